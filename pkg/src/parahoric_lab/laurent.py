"""Exact Laurent-polynomial matrices over the rationals in one formal variable.

A finite expansion stands in for an element of ``C((z))`` or ``C((w))``.
The action of the cyclic group ``w -> xi * w`` never needs roots of unity:
an entry is equivariant for ``rho = diag(xi^a_i)`` exactly when each of its
exponents ``k`` satisfies ``k = a_i - a_j (mod d)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .root_datum import Weight, as_fraction

VARIABLES = ("z", "w")
KINDS = ("group", "higgs")
FORM_FOR_VAR = {"z": "dz/z", "w": "dw/w"}


class LaurentError(ValueError):
    pass


class NotEquivariantError(LaurentError):
    """Raised with the offending entry and exponent."""

    def __init__(self, i: int, j: int, exponent: int, expected: int, d: int):
        self.entry = (i, j)
        self.exponent = exponent
        super().__init__(
            f"entry ({i + 1},{j + 1}) has exponent {exponent}, "
            f"needs {expected} mod {d}"
        )


class LaurentEntry:
    """Finite Laurent expansion ``sum c_k t^k`` with nonzero rational ``c_k``."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, object] | Iterable[tuple[int, object]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[int, Fraction] = {}
        for k, c in items:
            k = int(k)
            acc[k] = acc.get(k, Fraction(0)) + as_fraction(c)
        self._terms = {k: c for k, c in sorted(acc.items()) if c != 0}
        self._hash = None

    @classmethod
    def monomial(cls, exponent: int, coeff=1) -> "LaurentEntry":
        return cls({exponent: coeff})

    @classmethod
    def const(cls, c) -> "LaurentEntry":
        return cls({0: c})

    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def min_exponent(self) -> int | None:
        return next(iter(self._terms), None)

    def coeff(self, k: int) -> Fraction:
        return self._terms.get(k, Fraction(0))

    def __eq__(self, other):
        if isinstance(other, LaurentEntry):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == LaurentEntry.const(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    def __add__(self, other: "LaurentEntry") -> "LaurentEntry":
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, Fraction(0)) + c
        return LaurentEntry(out)

    def __neg__(self) -> "LaurentEntry":
        return LaurentEntry({k: -c for k, c in self._terms.items()})

    def __sub__(self, other: "LaurentEntry") -> "LaurentEntry":
        return self + (-other)

    def __mul__(self, other) -> "LaurentEntry":
        if not isinstance(other, LaurentEntry):
            c = as_fraction(other)
            return LaurentEntry({k: v * c for k, v in self._terms.items()})
        out: dict[int, Fraction] = {}
        for (k1, c1), (k2, c2) in itertools.product(self._terms.items(), other._terms.items()):
            out[k1 + k2] = out.get(k1 + k2, Fraction(0)) + c1 * c2
        return LaurentEntry(out)

    __rmul__ = __mul__

    def shift(self, s: int) -> "LaurentEntry":
        """Multiply by ``t^s``."""
        return LaurentEntry({k + s: c for k, c in self._terms.items()})

    def map_exponents(self, f) -> "LaurentEntry":
        return LaurentEntry({f(k): c for k, c in self._terms.items()})

    def __repr__(self):
        return f"LaurentEntry({self._terms!r})"

    def render(self, var: str = "z") -> str:
        if not self._terms:
            return "0"
        parts = []
        for k, c in self._terms.items():
            mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self) -> list[list[int]]:
        return [[k, c.numerator, c.denominator] for k, c in self._terms.items()]

    @classmethod
    def from_json(cls, triples) -> "LaurentEntry":
        terms = []
        for t in triples:
            if len(t) == 3:
                k, num, den = t
            elif len(t) == 2:
                k, num = t
                den = 1
            else:
                raise LaurentError(f"bad term {t!r}; expected [exp, num, den]")
            if int(den) == 0:
                raise LaurentError(f"zero denominator in term {t!r}")
            terms.append((int(k), Fraction(int(num), int(den))))
        return cls(terms)


ZERO = LaurentEntry()
ONE = LaurentEntry.const(1)


@dataclass(frozen=True, eq=False)
class LaurentMatrix:
    """Square matrix of Laurent expansions in ``z`` or ``w``.

    ``kind`` is ``"group"`` for loop-group elements and ``"higgs"`` for the
    coefficient matrix of a logarithmic form; for the latter ``form`` records
    which form (``dz/z`` or ``dw/w``) the coefficients multiply.
    """

    entries: tuple[tuple[LaurentEntry, ...], ...]
    var: str = "z"
    kind: str = "group"
    form: str | None = None

    def __post_init__(self):
        rows = tuple(
            tuple(e if isinstance(e, LaurentEntry) else _coerce_entry(e) for e in row)
            for row in self.entries
        )
        n = len(rows)
        if n == 0 or any(len(row) != n for row in rows):
            raise LaurentError("matrix must be square and nonempty")
        if self.var not in VARIABLES:
            raise LaurentError(f"unknown variable {self.var!r}")
        if self.kind not in KINDS:
            raise LaurentError(f"unknown kind {self.kind!r}")
        form = self.form
        if self.kind == "higgs":
            form = form or FORM_FOR_VAR[self.var]
            if form != FORM_FOR_VAR[self.var]:
                raise LaurentError(f"form {form} does not match variable {self.var}")
        elif form is not None:
            raise LaurentError("group elements carry no form")
        object.__setattr__(self, "entries", rows)
        object.__setattr__(self, "form", form)

    @property
    def n(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij: tuple[int, int]) -> LaurentEntry:
        i, j = ij
        return self.entries[i][j]

    @classmethod
    def identity(cls, n: int, var: str = "z") -> "LaurentMatrix":
        return cls(tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n)), var)

    @classmethod
    def zero(cls, n: int, var: str = "z", kind: str = "higgs") -> "LaurentMatrix":
        return cls(tuple(tuple(ZERO for _ in range(n)) for _ in range(n)), var, kind)

    @classmethod
    def diagonal_monomial(cls, exponents: Sequence[int], var: str = "w") -> "LaurentMatrix":
        n = len(exponents)
        return cls(
            tuple(
                tuple(LaurentEntry.monomial(exponents[i]) if i == j else ZERO for j in range(n))
                for i in range(n)
            ),
            var,
        )

    @classmethod
    def from_terms(cls, rows, var: str = "z", kind: str = "group") -> "LaurentMatrix":
        """Rows of ``{exponent: coeff}`` dicts (or scalars for constants)."""
        return cls(tuple(tuple(_coerce_entry(e) for e in row) for row in rows), var, kind)

    def replace(self, entries=None, var=None, kind=None, form=None) -> "LaurentMatrix":
        kind = self.kind if kind is None else kind
        var = self.var if var is None else var
        if form is None and kind == "higgs":
            form = FORM_FOR_VAR[var]
        return LaurentMatrix(self.entries if entries is None else entries, var, kind, form)

    def __eq__(self, other):
        if not isinstance(other, LaurentMatrix):
            return NotImplemented
        return (
            self.var == other.var
            and self.kind == other.kind
            and self.form == other.form
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.var, self.kind, self.form, self.entries))

    def map_entries(self, f) -> "LaurentMatrix":
        """Apply ``f(i, j, entry)`` to every entry, keeping the tags."""
        n = self.n
        return self.replace(tuple(tuple(f(i, j, self.entries[i][j]) for j in range(n)) for i in range(n)))

    def __add__(self, other: "LaurentMatrix") -> "LaurentMatrix":
        _check_compatible(self, other)
        if self.kind != other.kind:
            raise LaurentError("cannot add a group element to a Higgs coefficient")
        return self.map_entries(lambda i, j, e: e + other.entries[i][j])

    def __neg__(self):
        return self.map_entries(lambda i, j, e: -e)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "LaurentMatrix":
        c = as_fraction(c)
        return self.map_entries(lambda i, j, e: e * c)

    def __matmul__(self, other: "LaurentMatrix") -> "LaurentMatrix":
        return multiply(self, other)

    def is_identity(self) -> bool:
        return self == LaurentMatrix.identity(self.n, self.var)

    def support(self):
        """Yield ``(i, j, exponent, coeff)`` for every stored term."""
        for i, row in enumerate(self.entries):
            for j, e in enumerate(row):
                for k, c in e.items():
                    yield i, j, k, c

    def determinant(self) -> LaurentEntry:
        return _det([list(row) for row in self.entries])

    def inverse(self) -> "LaurentMatrix":
        """Exact inverse; only when the determinant is a single monomial."""
        if self.kind != "group":
            raise LaurentError("only group elements are inverted")
        det = self.determinant()
        if len(det.terms) != 1:
            raise LaurentError(f"determinant {det.render(self.var)} is not a unit monomial")
        (k, c), = det.items()
        inv_det = LaurentEntry.monomial(-k, 1 / c)
        n = self.n
        rows = [list(r) for r in self.entries]
        adj = []
        for i in range(n):
            adj_row = []
            for j in range(n):
                # adjugate entry (i, j) is the (j, i) cofactor
                minor = [row[:i] + row[i + 1:] for r_idx, row in enumerate(rows) if r_idx != j]
                cof = _det(minor) if minor else ONE
                if (i + j) % 2:
                    cof = -cof
                adj_row.append(cof * inv_det)
            adj.append(tuple(adj_row))
        return LaurentMatrix(tuple(adj), self.var, "group")

    def render(self) -> list[list[str]]:
        return [[e.render(self.var) for e in row] for row in self.entries]

    def to_json(self) -> dict:
        out = {
            "var": self.var,
            "kind": self.kind,
            "n": self.n,
            "entries": [[e.to_json() for e in row] for row in self.entries],
        }
        if self.kind == "higgs":
            out["form"] = self.form
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "LaurentMatrix":
        try:
            var = obj.get("var", "z")
            kind = obj.get("kind", "group")
            raw = obj["entries"]
            n = int(obj["n"]) if "n" in obj else len(raw)
        except (KeyError, TypeError) as exc:
            raise LaurentError(f"malformed matrix JSON: {exc}") from exc
        if len(raw) == n * n and all(_looks_like_term_list(x) for x in raw) and n > 1:
            raw = [raw[i * n:(i + 1) * n] for i in range(n)]
        if len(raw) != n or any(len(row) != n for row in raw):
            raise LaurentError(f"expected {n}x{n} entries")
        kind = {"group_element": "group", "higgs_coefficient": "higgs"}.get(kind, kind)
        entries = tuple(tuple(LaurentEntry.from_json(e) for e in row) for row in raw)
        return cls(entries, var, kind, obj.get("form"))


def _looks_like_term_list(x) -> bool:
    return isinstance(x, list) and all(isinstance(t, list) and t and isinstance(t[0], int) for t in x)


def _coerce_entry(e) -> LaurentEntry:
    if isinstance(e, LaurentEntry):
        return e
    if isinstance(e, Mapping):
        return LaurentEntry(e)
    return LaurentEntry.const(e)


def _check_compatible(a: LaurentMatrix, b: LaurentMatrix) -> None:
    if a.var != b.var:
        raise LaurentError(f"variable mismatch: {a.var} vs {b.var}")
    if a.n != b.n:
        raise LaurentError(f"size mismatch: {a.n} vs {b.n}")


def _det(rows: list[list[LaurentEntry]]) -> LaurentEntry:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    total = ZERO
    for j in range(n):
        if rows[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in rows[1:]]
        term = rows[0][j] * _det(minor)
        total = total - term if j % 2 else total + term
    return total


def multiply(a: LaurentMatrix, b: LaurentMatrix) -> LaurentMatrix:
    """Matrix product; group x group is a group element, anything with a Higgs side is Higgs."""
    _check_compatible(a, b)
    if a.kind == "higgs" and b.kind == "higgs":
        raise LaurentError("product of two Higgs coefficients is not defined here")
    kind = "higgs" if "higgs" in (a.kind, b.kind) else "group"
    n = a.n
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = ZERO
            for k in range(n):
                x, y = a.entries[i][k], b.entries[k][j]
                if x.is_zero() or y.is_zero():
                    continue
                acc = acc + x * y
            row.append(acc)
        rows.append(tuple(row))
    return LaurentMatrix(tuple(rows), a.var, kind)


def conjugate(g: LaurentMatrix, m: LaurentMatrix) -> LaurentMatrix:
    """``g m g^{-1}``."""
    return multiply(multiply(g, m), g.inverse())


@dataclass(frozen=True)
class EquivarianceClass:
    """Cyclic group of order ``d`` acting through ``rho = diag(xi^a_1, ..., xi^a_n)``.

    ``exponents`` are the integers ``a_i`` of ``Delta(w) = w^a``; they are kept
    as given (not reduced mod ``d``) because ``Delta`` depends on them.
    """

    d: int
    exponents: tuple[int, ...]

    def __post_init__(self):
        if int(self.d) < 1:
            raise LaurentError("cover order must be positive")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "exponents", tuple(int(a) for a in self.exponents))

    @classmethod
    def from_weight(cls, theta: Weight, d: int | None = None) -> "EquivarianceClass":
        d = theta.denominator if d is None else d
        try:
            return cls(d, theta.scaled(d))
        except ValueError as exc:
            raise LaurentError(str(exc)) from exc

    @property
    def n(self) -> int:
        return len(self.exponents)

    @property
    def theta(self) -> Weight:
        return Weight(tuple(Fraction(a, self.d) for a in self.exponents))

    @property
    def residues(self) -> tuple[tuple[int, ...], ...]:
        a = self.exponents
        return tuple(tuple((a[i] - a[j]) % self.d for j in range(self.n)) for i in range(self.n))

    @property
    def rho_exponents(self) -> tuple[int, ...]:
        return tuple(a % self.d for a in self.exponents)

    def delta(self) -> LaurentMatrix:
        return LaurentMatrix.diagonal_monomial(self.exponents, "w")


def equivariance_violation(m: LaurentMatrix, cls: EquivarianceClass) -> NotEquivariantError | None:
    if m.var != "w":
        raise LaurentError("equivariance is tested on w-matrices")
    if m.n != cls.n:
        raise LaurentError("size mismatch with equivariance class")
    res = cls.residues
    for i, j, k, _ in m.support():
        if (k - res[i][j]) % cls.d:
            return NotEquivariantError(i, j, k, res[i][j], cls.d)
    return None


def is_equivariant(m: LaurentMatrix, cls: EquivarianceClass) -> bool:
    return equivariance_violation(m, cls) is None


def is_invariant(m: LaurentMatrix, d: int) -> bool:
    """Invariance under ``w -> xi w``: every exponent divisible by ``d``."""
    if m.var != "w":
        raise LaurentError("invariance is tested on w-matrices")
    return all(k % d == 0 for _, _, k, _ in m.support())


def descend(m: LaurentMatrix, cls: EquivarianceClass) -> LaurentMatrix:
    """``Delta^{-1} m Delta`` rewritten in ``z = w^d``.

    Conjugating by the diagonal monomial ``Delta = w^a`` shifts entry
    ``(i, j)`` by ``-(a_i - a_j)``; the result is invariant and every exponent
    is divided by ``d``. Higgs coefficients of ``dw/w`` become coefficients
    of ``dz/z`` scaled by ``1/d``, since ``dz/z = d dw/w``.
    """
    bad = equivariance_violation(m, cls)
    if bad is not None:
        raise bad
    a, d = cls.exponents, cls.d

    def push(i, j, e):
        shift = -(a[i] - a[j])

        def down(k):
            q, r = divmod(k + shift, d)
            if r:
                raise LaurentError(f"exponent {k + shift} at ({i + 1},{j + 1}) is not divisible by {d}")
            return q

        return e.map_exponents(down)

    out = m.map_entries(push)
    out = LaurentMatrix(out.entries, "z", m.kind)
    if m.kind == "higgs":
        out = out.scale(Fraction(1, d))
    return out


def lift(m: LaurentMatrix, cls: EquivarianceClass) -> LaurentMatrix:
    """Inverse of :func:`descend`: ``z^k`` at ``(i, j)`` becomes ``w^(d k + a_i - a_j)``."""
    if m.var != "z":
        raise LaurentError("lift expects a z-matrix")
    if m.n != cls.n:
        raise LaurentError("size mismatch with equivariance class")
    a, d = cls.exponents, cls.d
    out = m.map_entries(lambda i, j, e: e.map_exponents(lambda k: d * k + a[i] - a[j]))
    out = LaurentMatrix(out.entries, "w", m.kind)
    if m.kind == "higgs":
        out = out.scale(d)
    return out
