"""Degrees and stability on a split-bundle model of parabolic Higgs bundles.

A bundle is modelled as a direct sum of line bundles ``L_1 + ... + L_n``
with integer degrees ``d_i``.  Each marked point carries one rational weight
per summand, and the Higgs field is represented by a constant residue
matrix ``Phi``.  Sub-objects are coordinate subsets ``S``; ``S`` is
``Phi``-invariant when ``Phi`` maps ``span(e_j : j in S)`` into itself.

Reduction to finitely many checks
---------------------------------
A reduction to a standard parabolic is a flag ``S_1 < ... < S_r = {1..n}``
and an anti-dominant character is a nondecreasing assignment
``lambda_1 < ... < lambda_r`` of values to the blocks ``V_j = S_j - S_{j-1}``.
The parahoric degree is linear in the character, so positivity over the
cone reduces to positivity on its generating rays.  Center-trivial rays on a
flag are ``-(n - |S_j|)`` on ``S_j`` and ``|S_j|`` off it, and the ray for
``S_j`` gives the same value on every flag through ``S_j``.  Hence:

* R-stability: ``|S| pardeg(E) - n pardeg(S) > 0`` for every proper invariant ``S``;
* R_mu-stability: step rays ``0 | 1`` give ``pardeg(E) - mu n - (pardeg(S) - mu |S|)``,
  and the central direction ``+-(1, ..., 1)`` gives ``+-(pardeg(E) - mu n)``,
  which must vanish;
* slope stability: ``pardeg(S)/|S| < pardeg(E)/n``.

Each checker evaluates its criterion along two routes (parahoric degrees of
explicit reductions, and the closed form above) and refuses to answer if
they disagree.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from typing import Sequence

from .root_datum import Weight, as_fraction

STABLE, SEMISTABLE, UNSTABLE = "stable", "semistable", "unstable"
VERDICT_RANK = {UNSTABLE: 0, SEMISTABLE: 1, STABLE: 2}


class InternalConsistencyError(AssertionError):
    """Two independent computations of the same quantity disagreed."""


@dataclass(frozen=True)
class ParabolicHiggsDatum:
    n: int
    degrees: tuple[int, ...]
    points: tuple[Weight, ...] = ()
    higgs: tuple[tuple[Fraction, ...], ...] | None = None
    group_tag: str = "gl"

    def __post_init__(self):
        n = int(self.n)
        if n < 1:
            raise ValueError("rank must be positive")
        degrees = tuple(int(x) for x in self.degrees)
        if len(degrees) != n:
            raise ValueError(f"expected {n} summand degrees, got {len(degrees)}")
        points = tuple(p if isinstance(p, Weight) else Weight.of(p) for p in self.points)
        for p in points:
            if p.n != n:
                raise ValueError(f"weight {p} does not have {n} coordinates")
        if self.higgs is None:
            higgs = tuple((Fraction(0),) * n for _ in range(n))
        else:
            higgs = tuple(tuple(as_fraction(x) for x in row) for row in self.higgs)
            if len(higgs) != n or any(len(row) != n for row in higgs):
                raise ValueError(f"Higgs residue must be {n}x{n}")
        if self.group_tag not in ("gl", "sl", "custom"):
            raise ValueError(f"unknown group tag {self.group_tag!r}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "degrees", degrees)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "higgs", higgs)

    @cached_property
    def scale(self) -> int:
        """Common denominator of all weights."""
        return math.lcm(1, *(p.denominator for p in self.points))

    @cached_property
    def scaled_contributions(self) -> tuple[int, ...]:
        """``scale`` times the parabolic degree of each summand."""
        L = self.scale
        return tuple(
            L * self.degrees[i] + sum(int(p.coords[i] * L) for p in self.points)
            for i in range(self.n)
        )

    @cached_property
    def scaled_eigenspaces(self) -> tuple[tuple[tuple[int, frozenset], ...], ...]:
        """Per point, distinct weights (times ``scale``) in decreasing order with their coordinates."""
        L = self.scale
        out = []
        for p in self.points:
            spaces: dict[Fraction, set[int]] = {}
            for i, a in enumerate(p.coords):
                spaces.setdefault(a, set()).add(i)
            out.append(tuple((int(a * L), frozenset(spaces[a])) for a in sorted(spaces, reverse=True)))
        return tuple(out)

    def normalized(self) -> "ParabolicHiggsDatum":
        """Move every weight into ``[0, 1)``; the integer parts go into the degrees.

        Shifting a weight by an integer at one summand is a Hecke modification
        at that summand and leaves every parabolic degree unchanged.
        """
        degrees = list(self.degrees)
        points = []
        for p in self.points:
            coords = []
            for i, c in enumerate(p.coords):
                fl = c.numerator // c.denominator
                degrees[i] += fl
                coords.append(c - fl)
            points.append(Weight(tuple(coords)))
        return ParabolicHiggsDatum(self.n, tuple(degrees), tuple(points), self.higgs, self.group_tag)

    def with_points(self, points) -> "ParabolicHiggsDatum":
        return ParabolicHiggsDatum(self.n, self.degrees, tuple(points), self.higgs, self.group_tag)

    def with_higgs(self, higgs) -> "ParabolicHiggsDatum":
        return ParabolicHiggsDatum(self.n, self.degrees, self.points, higgs, self.group_tag)

    @classmethod
    def from_json(cls, obj: dict) -> "ParabolicHiggsDatum":
        try:
            n = int(obj["n"])
            degrees = obj["degrees"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed datum: {exc}") from exc
        points = []
        for p in obj.get("points", []):
            theta = p["theta"] if isinstance(p, dict) else p
            points.append(Weight(tuple(as_fraction(x) for x in theta)))
        higgs = obj.get("higgs")
        datum = cls(n, tuple(degrees), tuple(points), higgs, obj.get("group", "gl"))
        if obj.get("normalize"):
            datum = datum.normalized()
        return datum

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "group": self.group_tag,
            "degrees": list(self.degrees),
            "points": [{"theta": [fmt(c) for c in p.coords]} for p in self.points],
            "higgs": [[fmt(x) for x in row] for row in self.higgs],
        }


def fmt(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class ReductionDatum:
    """A flag of coordinate subsets with an anti-dominant character on its blocks.

    ``flag`` lists ``S_1, ..., S_r`` (0-based indices); ``S_r`` must be the
    full index set.  ``character`` holds ``lambda_1 < ... < lambda_r``.
    """

    flag: tuple[frozenset, ...]
    character: tuple[Fraction, ...]

    def __post_init__(self):
        flag = tuple(frozenset(s) for s in self.flag)
        lam = tuple(as_fraction(x) for x in self.character)
        if not flag:
            raise ValueError("a flag needs at least the full set")
        if len(lam) != len(flag):
            raise ValueError("need one character value per flag member")
        for a, b in zip(flag, flag[1:]):
            if not a < b:
                raise ValueError(f"flag is not strictly increasing at {sorted(a)} -> {sorted(b)}")
        if not flag[0]:
            raise ValueError("flag members must be nonempty")
        for a, b in zip(lam, lam[1:]):
            if not a < b:
                raise ValueError("character values must be strictly increasing (anti-dominant)")
        object.__setattr__(self, "flag", flag)
        object.__setattr__(self, "character", lam)

    @classmethod
    def of(cls, flag: Sequence[Sequence[int]], character: Sequence) -> "ReductionDatum":
        return cls(tuple(frozenset(s) for s in flag), tuple(character))

    @classmethod
    def two_step(cls, subset, n: int, character) -> "ReductionDatum":
        return cls((frozenset(subset), frozenset(range(n))), tuple(character))

    @property
    def r(self) -> int:
        return len(self.flag)

    def blocks(self) -> list[frozenset]:
        out, prev = [], frozenset()
        for s in self.flag:
            out.append(s - prev)
            prev = s
        return out

    def character_values(self, n: int) -> list[Fraction]:
        chi = [Fraction(0)] * n
        for lam, block in zip(self.character, self.blocks()):
            for i in block:
                chi[i] = lam
        return chi

    def validate(self, n: int) -> None:
        if self.flag[-1] != frozenset(range(n)):
            raise ValueError("last flag member must be the full index set")


def parabolic_degree(d: ParabolicHiggsDatum, s) -> Fraction:
    c = d.scaled_contributions
    return Fraction(sum(c[i] for i in s), d.scale)


def slope(d: ParabolicHiggsDatum, s) -> Fraction:
    s = list(s)
    if not s:
        raise ValueError("slope of the empty subobject")
    return parabolic_degree(d, s) / len(s)


def _scaled_character(lam: Sequence[Fraction]) -> tuple[list[int], int]:
    den = math.lcm(*(x.denominator for x in lam))
    return [int(x * den) for x in lam], den


def _degree_routes_scaled(d: ParabolicHiggsDatum, blocks: Sequence[frozenset], lam: Sequence[int]) -> tuple[int, int]:
    """Both parahoric-degree routes for integer block values, in units of ``1/scale``.

    First route: ``deg L^chi + <theta, chi>``, the pairing taken through the
    eigenspaces of each weight.  Second: ``sum_j lambda_j pardeg(V_j)``.
    """
    L = d.scale
    via_character = 0
    for lj, vj in zip(lam, blocks):
        if lj:
            via_character += lj * L * sum(d.degrees[i] for i in vj)
    for eigen in d.scaled_eigenspaces:
        for alpha, space in eigen:
            if not alpha:
                continue
            for lj, vj in zip(lam, blocks):
                if lj:
                    k = len(space & vj)
                    if k:
                        via_character += alpha * lj * k
    c = d.scaled_contributions
    via_blocks = sum(lj * sum(c[i] for i in vj) for lj, vj in zip(lam, blocks))
    return via_character, via_blocks


def _checked_degree_scaled(d: ParabolicHiggsDatum, blocks, lam: Sequence[int]) -> int:
    a, b = _degree_routes_scaled(d, blocks, lam)
    if a != b:
        raise InternalConsistencyError(f"parahoric degree routes disagree: {a} vs {b} (scale {d.scale})")
    return a


def parahoric_degree_routes(d: ParabolicHiggsDatum, r: ReductionDatum) -> tuple[Fraction, Fraction]:
    """``(deg L^chi + <theta, chi>, sum_j lambda_j pardeg V_j)``."""
    r.validate(d.n)
    lam, den = _scaled_character(r.character)
    a, b = _degree_routes_scaled(d, r.blocks(), lam)
    return Fraction(a, d.scale * den), Fraction(b, d.scale * den)


def parahoric_degree(d: ParabolicHiggsDatum, r: ReductionDatum) -> Fraction:
    a, b = parahoric_degree_routes(d, r)
    if a != b:
        raise InternalConsistencyError(f"parahoric degree routes disagree: {a} vs {b}")
    return a


def equivariant_degree(d: ParabolicHiggsDatum, r: ReductionDatum, cover_order: int) -> Fraction:
    """Degree of the corresponding reduction upstairs on the degree-``cover_order`` cover.

    Pulled-back summands have ``cover_order`` times the degree, and the
    twist by ``Delta = w^a`` with ``a = cover_order * theta`` adds
    ``<a, chi>`` at each marked point.
    """
    if cover_order < 1:
        raise ValueError("cover order must be positive")
    r.validate(d.n)
    try:
        exps = [p.scaled(cover_order) for p in d.points]
    except ValueError as exc:
        raise ValueError(f"cover order {cover_order} does not clear weight denominators") from exc
    chi = r.character_values(d.n)
    upstairs = sum((lam * cover_order * d.degrees[i] for i, lam in enumerate(chi)), Fraction(0))
    for a in exps:
        upstairs += sum((lam * ai for lam, ai in zip(chi, a)), Fraction(0))
    expected = cover_order * parahoric_degree(d, r)
    if upstairs != expected:
        raise InternalConsistencyError(
            f"equivariant degree {upstairs} != {cover_order} * parahoric degree {expected}"
        )
    return upstairs


def is_invariant_subset(d: ParabolicHiggsDatum, s) -> bool:
    s = set(s)
    phi = d.higgs
    return all(phi[i][j] == 0 for j in s for i in range(d.n) if i not in s)


def invariant_subsets(d: ParabolicHiggsDatum, with_higgs: bool = True) -> list[frozenset]:
    """All (Higgs-)invariant coordinate subsets, ordered by size then lexicographically."""
    out = []
    for k in range(d.n + 1):
        for combo in itertools.combinations(range(d.n), k):
            if not with_higgs or is_invariant_subset(d, combo):
                out.append(frozenset(combo))
    return out


def _proper(d: ParabolicHiggsDatum, with_higgs: bool) -> list[frozenset]:
    return [s for s in invariant_subsets(d, with_higgs) if 0 < len(s) < d.n]


@dataclass(frozen=True)
class Witness:
    subset: tuple[int, ...]
    margin: Fraction
    character: tuple[Fraction, ...] = ()

    def to_json(self) -> dict:
        out = {"subset": [i + 1 for i in self.subset], "margin": fmt(self.margin)}
        if self.character:
            out["character"] = [fmt(x) for x in self.character]
        return out


@dataclass(frozen=True)
class CheckResult:
    verdict: str
    witness: Witness | None = None
    margins: dict = field(default_factory=dict, compare=False)

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "witness": None if self.witness is None else self.witness.to_json(),
        }


def _conclude(candidates: list[tuple[tuple, Witness]]) -> CheckResult:
    """Verdict from ``(sort key, witness)`` pairs; the key's first entry has the margin's sign."""
    margins = {w.subset: w.margin for _, w in candidates}
    if not candidates:
        return CheckResult(STABLE, None, margins)
    key, worst = min(candidates, key=lambda kw: kw[0])
    if worst.margin > 0:
        return CheckResult(STABLE, None, margins)
    return CheckResult(SEMISTABLE if worst.margin == 0 else UNSTABLE, worst, margins)


def _witness_key(gap: Fraction, s: frozenset) -> tuple:
    return (gap, len(s), tuple(sorted(s)))


def _require_type_a(d: ParabolicHiggsDatum) -> None:
    if d.group_tag not in ("gl", "sl"):
        raise ValueError("finite stability checks are implemented for gl and sl data only")


def check_R(d: ParabolicHiggsDatum, with_higgs: bool = True) -> CheckResult:
    _require_type_a(d)
    n, L = d.n, d.scale
    c = d.scaled_contributions
    total = sum(c)
    full = frozenset(range(n))
    cands = []
    for s in _proper(d, with_higgs):
        m = len(s)
        ray = (-(n - m), m)
        via_reduction = _checked_degree_scaled(d, (s, full - s), ray)
        closed = m * total - n * sum(c[i] for i in s)
        if via_reduction != closed:
            raise InternalConsistencyError(f"R-margin routes disagree on {sorted(s)}")
        w = Witness(tuple(sorted(s)), Fraction(via_reduction, L), (Fraction(ray[0]), Fraction(ray[1])))
        cands.append((_witness_key(Fraction(via_reduction, L * n * m), s), w))
    return _conclude(cands)


def canonical_mu_pairings(d: ParabolicHiggsDatum, center_basis: Sequence[Sequence[int]]) -> list[Fraction]:
    """``<mu, chi_i>`` := parahoric degree of the trivial reduction against each center character."""
    out = []
    for c in center_basis:
        c = [as_fraction(x) for x in c]
        if len(c) != d.n:
            raise ValueError("center character has wrong length")
        value = sum((x * deg for x, deg in zip(c, d.degrees)), Fraction(0))
        for p in d.points:
            value += sum((t * x for t, x in zip(p.coords, c)), Fraction(0))
        out.append(value)
    return out


def canonical_mu(d: ParabolicHiggsDatum) -> Fraction:
    """Scalar canonical mu for gl data: the parabolic slope of the whole bundle."""
    if d.group_tag != "gl":
        raise ValueError("scalar canonical mu needs a one-dimensional center (gl data)")
    (pairing,) = canonical_mu_pairings(d, [(1,) * d.n])
    # <varpi, (1, ..., 1)> = n
    return pairing / d.n


def check_R_mu(d: ParabolicHiggsDatum, mu, with_higgs: bool = True) -> CheckResult:
    """R_mu check; ``mu=None`` on sl data evaluates characters modulo the center."""
    _require_type_a(d)
    n, L = d.n, d.scale
    c = d.scaled_contributions
    total = sum(c)
    if mu is None:
        if d.group_tag != "sl":
            raise ValueError("mu is required for gl data")
        mu = Fraction(total, L * n)
    mu = as_fraction(mu)
    p, q = mu.numerator, mu.denominator
    proper = _proper(d, with_higgs)
    if not proper:
        return CheckResult(STABLE)
    full = frozenset(range(n))
    # all margins below are in units of 1/(L q)
    top = q * _checked_degree_scaled(d, (full,), (1,)) - p * L * n
    if top != q * total - p * L * n:
        raise InternalConsistencyError("central R_mu term routes disagree")
    if top != 0:
        # +-(1, ..., 1) added to any anti-dominant character stays anti-dominant
        return CheckResult(UNSTABLE, Witness(tuple(range(n)), -Fraction(abs(top), L * q), (Fraction(1),) * n))
    cands = []
    for s in proper:
        m = len(s)
        via_reduction = q * _checked_degree_scaled(d, (s, full - s), (0, 1)) - p * L * (n - m)
        telescoped = top - (q * sum(c[i] for i in s) - p * L * m)
        if via_reduction != telescoped:
            raise InternalConsistencyError(f"R_mu-margin routes disagree on {sorted(s)}")
        w = Witness(tuple(sorted(s)), Fraction(via_reduction, L * q), (Fraction(0), Fraction(1)))
        cands.append((_witness_key(Fraction(via_reduction, L * q * m), s), w))
    return _conclude(cands)


def check_slope(d: ParabolicHiggsDatum, with_higgs: bool = True) -> CheckResult:
    n = d.n
    mu = parabolic_degree(d, range(n)) / n
    cands = []
    for s in _proper(d, with_higgs):
        gap = mu - slope(d, s)
        cands.append((_witness_key(gap, s), Witness(tuple(sorted(s)), gap)))
    return _conclude(cands)


@dataclass(frozen=True)
class StabilityReport:
    R: CheckResult
    R_mu: CheckResult
    slope: CheckResult
    mu_used: Fraction | None
    underlying: "StabilityReport | None" = None

    @property
    def verdict(self) -> str:
        return self.slope.verdict

    @property
    def verdicts(self) -> dict[str, str]:
        return {"R": self.R.verdict, "R_mu": self.R_mu.verdict, "slope": self.slope.verdict}

    def to_json(self) -> dict:
        out = {
            "verdicts": self.verdicts,
            "mu_used": None if self.mu_used is None else fmt(self.mu_used),
            "witnesses": {
                "R": self.R.to_json()["witness"],
                "R_mu": self.R_mu.to_json()["witness"],
                "slope": self.slope.to_json()["witness"],
            },
        }
        if self.underlying is not None:
            out["without_higgs"] = self.underlying.to_json()
        return out


def _report(d: ParabolicHiggsDatum, with_higgs: bool) -> StabilityReport:
    mu = canonical_mu(d) if d.group_tag == "gl" else None
    rep = StabilityReport(
        check_R(d, with_higgs), check_R_mu(d, mu, with_higgs), check_slope(d, with_higgs), mu
    )
    if len(set(rep.verdicts.values())) != 1:
        raise InternalConsistencyError(f"stability verdicts disagree: {rep.verdicts}")
    subsets = {c.witness.subset for c in (rep.R, rep.R_mu, rep.slope) if c.witness is not None}
    if len(subsets) > 1:
        raise InternalConsistencyError(f"witnesses disagree: {subsets}")
    return rep


def full_report(d: ParabolicHiggsDatum) -> StabilityReport:
    """All three checkers, for the Higgs pair and for the underlying bundle."""
    _require_type_a(d)
    higgs = _report(d, True)
    bare = _report(d, False)
    if VERDICT_RANK[bare.verdict] > VERDICT_RANK[higgs.verdict]:
        raise InternalConsistencyError("imposing the Higgs field made the verdict less stable")
    return StabilityReport(higgs.R, higgs.R_mu, higgs.slope, higgs.mu_used, bare)
