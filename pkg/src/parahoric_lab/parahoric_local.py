"""Pole-order profiles of parahoric subgroups and membership tests.

Entry ``(i, j)`` of a matrix carries the root ``e_i - e_j``; its pole bound
is ``m = ceil(-(theta_i - theta_j)) = ceil(theta_j - theta_i)``.  For the
SL_2 weight ``(1/2, -1/2)`` this gives the familiar shape::

    [[A,  z^-1 A],
     [zA, A     ]]
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .laurent import LaurentError, LaurentMatrix
from .root_datum import ParabolicType, RootDatum, Weight, unit_root


@dataclass(frozen=True)
class PoleProfile:
    theta: Weight
    bounds: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.bounds)

    def bound(self, i: int, j: int) -> int:
        return self.bounds[i][j]

    def cells(self, transposed: bool = False) -> list[list[str]]:
        """Cell notation ``z^m A``; ``transposed`` gives the other (i,j)-to-root reading."""
        b = self.bounds
        n = self.n
        return [[_cell(b[j][i] if transposed else b[i][j]) for j in range(n)] for i in range(n)]

    def table(self, transposed: bool = False) -> str:
        cells = self.cells(transposed)
        width = max(len(c) for row in cells for c in row)
        return "\n".join("[ " + "  ".join(c.ljust(width) for c in row) + " ]" for row in cells)

    def to_json(self) -> dict:
        return {
            "theta": [str(c) for c in self.theta.coords],
            "denominator": self.theta.denominator,
            "bounds": [list(r) for r in self.bounds],
            "cells": self.cells(),
        }


def _cell(m: int) -> str:
    if m == 0:
        return "A"
    if m == 1:
        return "zA"
    return f"z^{{{m}}}A"


def profile(datum: RootDatum | None, theta: Weight) -> PoleProfile:
    n = theta.n
    if datum is not None and datum.rank != n:
        raise ValueError(f"weight has {n} coordinates, datum has rank {datum.rank}")
    bounds = []
    for i in range(n):
        row = []
        for j in range(n):
            if i == j:
                row.append(0)
                continue
            r = unit_root(n, i, j)
            r_theta = sum((t * c for t, c in zip(theta.coords, r)), Fraction(0))
            row.append(math.ceil(-r_theta))
        bounds.append(tuple(row))
    return PoleProfile(theta, tuple(bounds))


def _check_z(m: LaurentMatrix, kind: str, p: PoleProfile) -> None:
    if m.var != "z":
        raise LaurentError(f"membership is tested on z-matrices, got {m.var}")
    if m.kind != kind:
        raise LaurentError(f"expected a {kind} matrix, got {m.kind}")
    if m.n != p.n:
        raise LaurentError("size mismatch with profile")


def bound_violations(m: LaurentMatrix, p: PoleProfile) -> list[tuple[int, int, int, int]]:
    """``(i, j, lowest exponent, bound)`` for each entry with too deep a pole."""
    out = []
    for i in range(p.n):
        for j in range(p.n):
            e = m.entries[i][j]
            if e.is_zero():
                continue
            k = e.min_exponent()
            if k < p.bounds[i][j]:
                out.append((i, j, k, p.bounds[i][j]))
    return out


def leading_matrix(m: LaurentMatrix, theta: Weight) -> list[list[Fraction]]:
    """Value at ``z = 0`` of ``z^theta m z^-theta`` for an entrywise-bounded ``m``.

    Only entries with ``theta_i - theta_j`` integral contribute, through their
    coefficient of ``z^(theta_j - theta_i)``.
    """
    n = m.n
    th = theta.coords
    out = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            diff = th[j] - th[i]
            if diff.denominator == 1:
                out[i][j] = m.entries[i][j].coeff(diff.numerator)
    return out


def rational_det(a: Sequence[Sequence[Fraction]]) -> Fraction:
    a = [list(r) for r in a]
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        pivot = next((r for r in range(c, n) if a[r][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            a[c], a[pivot] = a[pivot], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            if f:
                for k in range(c, n):
                    a[r][k] -= f * a[c][k]
    return det


def is_member(m: LaurentMatrix, p: PoleProfile) -> bool:
    """Lattice-stabilizer membership in the parahoric subgroup.

    Entrywise pole bounds (diagonal holomorphic) plus invertibility of the
    limit of ``z^theta m z^-theta`` at the origin.
    """
    _check_z(m, "group", p)
    if bound_violations(m, p):
        return False
    return rational_det(leading_matrix(m, p.theta)) != 0


def is_higgs_member(phi: LaurentMatrix, p: PoleProfile) -> bool:
    _check_z(phi, "higgs", p)
    if phi.form != "dz/z":
        raise LaurentError(f"Higgs coefficient must multiply dz/z, got {phi.form}")
    return not bound_violations(phi, p)


@dataclass(frozen=True)
class ParabolicProfile:
    base: PoleProfile
    parabolic: ParabolicType

    def __post_init__(self):
        if self.parabolic.n != self.base.n:
            raise ValueError("parabolic and profile sizes differ")

    @property
    def forbidden(self) -> frozenset[tuple[int, int]]:
        n = self.base.n
        return frozenset(
            (i, j) for i in range(n) for j in range(n) if not self.parabolic.contains_root(i, j)
        )

    def cells(self) -> list[list[str]]:
        cells = self.base.cells()
        for i, j in self.forbidden:
            cells[i][j] = "0"
        return cells


def is_liftable(phi: LaurentMatrix, pp: ParabolicProfile) -> bool:
    """Whether a Higgs coefficient already lies in the Lie algebra of the parahoric parabolic."""
    if not is_higgs_member(phi, pp.base):
        raise LaurentError("Higgs field is not a member of the base profile")
    return all(phi.entries[i][j].is_zero() for i, j in pp.forbidden)


def hecke_shift(p: PoleProfile, integral: Sequence) -> PoleProfile:
    """Profile of ``theta + shift`` for an integral cocharacter ``shift``."""
    shift = []
    for x in integral:
        f = Fraction(x) if not isinstance(x, Fraction) else x
        if f.denominator != 1:
            raise ValueError(f"shift component {x} is not an integer")
        shift.append(f.numerator)
    if len(shift) != p.n:
        raise ValueError("shift has wrong length")
    n = p.n
    bounds = tuple(
        tuple(p.bounds[i][j] - (shift[i] - shift[j]) for j in range(n)) for i in range(n)
    )
    return PoleProfile(p.theta + shift, bounds)
