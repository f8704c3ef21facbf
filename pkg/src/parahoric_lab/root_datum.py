"""Root data of type A, rational weights, standard parabolics and characters.

Everything here is exact: coordinates are :class:`fractions.Fraction` and
characters are integer (or rational) vectors in the standard basis
``e_1, ..., e_n`` of the character lattice of the diagonal torus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

GROUP_TAGS = ("gl", "sl", "custom")


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions, ``"p/q"`` strings and ``[num, den]`` pairs."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return Fraction(int(value[0]), int(value[1]))
    if isinstance(value, float):
        raise TypeError("floats are not accepted; pass an exact rational")
    raise TypeError(f"cannot read {value!r} as a rational")


def unit_root(n: int, i: int, j: int) -> tuple[int, ...]:
    """The root ``e_i - e_j`` (0-based indices)."""
    v = [0] * n
    v[i] += 1
    v[j] -= 1
    return tuple(v)


@dataclass(frozen=True)
class Weight:
    """A rational cocharacter, stored by its diagonal coordinates."""

    coords: tuple[Fraction, ...]

    def __post_init__(self):
        coords = tuple(as_fraction(c) for c in self.coords)
        if not coords:
            raise ValueError("a weight needs at least one coordinate")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def of(cls, *values) -> "Weight":
        if len(values) == 1 and isinstance(values[0], (list, tuple)):
            values = tuple(values[0])
        return cls(tuple(as_fraction(v) for v in values))

    @classmethod
    def zero(cls, n: int) -> "Weight":
        return cls((Fraction(0),) * n)

    @property
    def n(self) -> int:
        return len(self.coords)

    @property
    def denominator(self) -> int:
        return math.lcm(*(c.denominator for c in self.coords))

    def scaled(self, d: int | None = None) -> tuple[int, ...]:
        """Integer vector ``d * theta``; ``d`` defaults to the denominator."""
        d = self.denominator if d is None else d
        out = []
        for c in self.coords:
            v = c * d
            if v.denominator != 1:
                raise ValueError(f"{d} * {c} is not an integer")
            out.append(v.numerator)
        return tuple(out)

    def __add__(self, other) -> "Weight":
        other = other.coords if isinstance(other, Weight) else tuple(as_fraction(x) for x in other)
        if len(other) != self.n:
            raise ValueError("dimension mismatch")
        return Weight(tuple(a + b for a, b in zip(self.coords, other)))

    def __iter__(self):
        return iter(self.coords)

    def __str__(self):
        return "(" + ", ".join(str(c) for c in self.coords) + ")"


@dataclass(frozen=True)
class RootDatum:
    rank: int
    roots: tuple[tuple[int, ...], ...]
    simple_roots: tuple[tuple[int, ...], ...]
    center_basis: tuple[tuple[int, ...], ...]
    group_tag: str = "custom"
    _root_set: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("rank must be positive")
        if self.group_tag not in GROUP_TAGS:
            raise ValueError(f"unknown group tag {self.group_tag!r}")
        roots = tuple(tuple(int(x) for x in r) for r in self.roots)
        simple = tuple(tuple(int(x) for x in r) for r in self.simple_roots)
        center = tuple(tuple(int(x) for x in c) for c in self.center_basis)
        for vec in roots + simple + center:
            if len(vec) != self.rank:
                raise ValueError(f"vector {vec} has wrong length for rank {self.rank}")
        root_set = frozenset(roots)
        for r in roots:
            if not any(r):
                raise ValueError("zero vector is not a root")
            if tuple(-x for x in r) not in root_set:
                raise ValueError(f"negative of root {r} is missing")
        for s in simple:
            if s not in root_set:
                raise ValueError(f"simple root {s} is not a root")
        object.__setattr__(self, "roots", roots)
        object.__setattr__(self, "simple_roots", simple)
        object.__setattr__(self, "center_basis", center)
        object.__setattr__(self, "_root_set", root_set)

    @classmethod
    def gl(cls, n: int) -> "RootDatum":
        return cls(
            n,
            _type_a_roots(n),
            tuple(unit_root(n, i, i + 1) for i in range(n - 1)),
            ((1,) * n,),
            "gl",
        )

    @classmethod
    def sl(cls, n: int) -> "RootDatum":
        # the center of SL_n is finite, so it contributes no rational characters
        return cls(
            n,
            _type_a_roots(n),
            tuple(unit_root(n, i, i + 1) for i in range(n - 1)),
            (),
            "sl",
        )

    @classmethod
    def from_json(cls, obj: dict) -> "RootDatum":
        group = obj.get("group", "custom")
        n = int(obj["rank"])
        if group == "gl" and "roots" not in obj:
            return cls.gl(n)
        if group == "sl" and "roots" not in obj:
            return cls.sl(n)
        return cls(
            n,
            tuple(tuple(r) for r in obj["roots"]),
            tuple(tuple(r) for r in obj.get("simple", ())),
            tuple(tuple(c) for c in obj.get("center", ())),
            group,
        )

    def to_json(self) -> dict:
        return {
            "group": self.group_tag,
            "rank": self.rank,
            "roots": [list(r) for r in self.roots],
            "simple": [list(r) for r in self.simple_roots],
            "center": [list(c) for c in self.center_basis],
        }

    def has_root(self, root: Sequence[int]) -> bool:
        return tuple(root) in self._root_set

    def reduce_character(self, values: Sequence) -> tuple[Fraction, ...]:
        """Canonical representative of a character; for sl, modulo the all-ones vector."""
        vals = tuple(as_fraction(v) for v in values)
        if self.group_tag != "sl":
            return vals
        shift = vals[-1]
        return tuple(v - shift for v in vals)


def _type_a_roots(n: int) -> tuple[tuple[int, ...], ...]:
    return tuple(unit_root(n, i, j) for i in range(n) for j in range(n) if i != j)


@dataclass(frozen=True)
class ParabolicType:
    """Block-upper-triangular parabolic given by consecutive Levi block sizes.

    ``opposite=True`` gives the block-lower-triangular opposite parabolic.
    """

    block_sizes: tuple[int, ...]
    opposite: bool = False

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.block_sizes)
        if not sizes or any(s <= 0 for s in sizes):
            raise ValueError("blocks must be nonempty")
        object.__setattr__(self, "block_sizes", sizes)

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]], opposite: bool = False) -> "ParabolicType":
        """Build from explicit 1-based index blocks such as ``[[1], [2, 3]]``."""
        blocks = [list(b) for b in blocks]
        expected = 1
        sizes = []
        for b in blocks:
            if not b or b != list(range(expected, expected + len(b))):
                raise ValueError(f"blocks must be consecutive and cover 1..n, got {blocks}")
            expected += len(b)
            sizes.append(len(b))
        return cls(tuple(sizes), opposite)

    @classmethod
    def borel(cls, n: int, opposite: bool = False) -> "ParabolicType":
        return cls((1,) * n, opposite)

    @property
    def n(self) -> int:
        return sum(self.block_sizes)

    @property
    def r(self) -> int:
        return len(self.block_sizes)

    @property
    def levi_blocks(self) -> tuple[tuple[int, ...], ...]:
        """0-based index blocks."""
        out, start = [], 0
        for s in self.block_sizes:
            out.append(tuple(range(start, start + s)))
            start += s
        return tuple(out)

    def block_of(self) -> tuple[int, ...]:
        """Block number of each coordinate."""
        return tuple(b for b, s in enumerate(self.block_sizes) for _ in range(s))

    def contains_root(self, i: int, j: int) -> bool:
        """Whether the root ``e_i - e_j`` (entry ``(i, j)``) lies in the parabolic."""
        blk = self.block_of()
        if self.opposite:
            return blk[i] >= blk[j]
        return blk[i] <= blk[j]

    @property
    def is_proper(self) -> bool:
        return self.r >= 2


@dataclass(frozen=True)
class Character:
    """A character of the diagonal torus, given by its coordinate values."""

    values: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(as_fraction(v) for v in self.values))

    @classmethod
    def from_blocks(cls, p: ParabolicType, block_values: Sequence) -> "Character":
        if len(block_values) != p.r:
            raise ValueError("need one value per Levi block")
        vals = []
        for v, s in zip(block_values, p.block_sizes):
            vals.extend([as_fraction(v)] * s)
        return cls(tuple(vals))

    @property
    def n(self) -> int:
        return len(self.values)

    def block_values(self, p: ParabolicType) -> tuple[Fraction, ...]:
        if p.n != self.n:
            raise ValueError("dimension mismatch")
        out = []
        for block in p.levi_blocks:
            vals = {self.values[i] for i in block}
            if len(vals) != 1:
                raise ValueError(f"character is not constant on block {block}")
            out.append(vals.pop())
        return tuple(out)

    def is_antidominant(self, p: ParabolicType) -> bool:
        """Block values nondecreasing from the first Levi block to the last."""
        try:
            lam = self.block_values(p)
        except ValueError:
            return False
        return all(a <= b for a, b in zip(lam, lam[1:]))


def pairing(theta: Weight, chi) -> Fraction:
    values = chi.values if isinstance(chi, Character) else tuple(as_fraction(x) for x in chi)
    if len(values) != theta.n:
        raise ValueError(f"dimension mismatch: weight has {theta.n}, character has {len(values)}")
    return sum((t * c for t, c in zip(theta.coords, values)), Fraction(0))


def root_value(theta: Weight, root: Sequence[int], datum: RootDatum | None = None) -> Fraction:
    if datum is not None and not datum.has_root(root):
        raise ValueError(f"{tuple(root)} is not a root of the datum")
    return pairing(theta, root)


def antidominant_ray_basis(p: ParabolicType, center_trivial: bool = True) -> list[Character]:
    """Generators of the anti-dominant cone of characters of ``p``.

    With ``center_trivial`` the rays are ``-(n - m_j)`` on the first ``j``
    blocks and ``m_j`` on the rest, ``m_j`` the size of the first ``j``
    blocks; they span the cone of anti-dominant characters orthogonal to
    ``(1, ..., 1)``. Otherwise the step rays ``0 | 1`` are returned; the
    full cone is then their span plus the line through ``(1, ..., 1)``.
    """
    if center_trivial and not p.is_proper:
        raise ValueError("the trivial parabolic has no nonzero center-trivial characters")
    n = p.n
    rays = []
    m = 0
    for j in range(1, p.r):
        m += p.block_sizes[j - 1]
        if center_trivial:
            lam = [-(n - m)] * j + [m] * (p.r - j)
        else:
            lam = [0] * j + [1] * (p.r - j)
        rays.append(Character.from_blocks(p, lam))
    return rays


def decompose_in_rays(p: ParabolicType, chi: Character) -> list[Fraction]:
    """Coefficients expressing a center-trivial anti-dominant ``chi`` in the ray basis.

    The rays form a triangular system in the consecutive block differences,
    so the solution is unique; it is nonnegative iff ``chi`` is anti-dominant.
    """
    lam = chi.block_values(p)
    if sum(chi.values) != 0:
        raise ValueError("character is not trivial on the center")
    # ray j jumps by n between blocks j and j+1 and is flat elsewhere
    return [(lam[j] - lam[j - 1]) / p.n for j in range(1, p.r)]
