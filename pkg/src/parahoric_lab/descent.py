"""Transport between equivariant data on the w-disk and parahoric data on the z-disk."""

from __future__ import annotations

from dataclasses import dataclass

from .laurent import EquivarianceClass, LaurentError, LaurentMatrix, descend, equivariance_violation, lift
from .parahoric_local import PoleProfile, bound_violations, is_higgs_member, is_member, profile
from .root_datum import Weight


class DescentError(LaurentError):
    pass


@dataclass(frozen=True)
class EquivariantLocalDatum:
    """An automorphism or Higgs coefficient over the w-disk with its Gamma-type.

    ``delta_exponents`` are the exponents ``a`` of ``Delta(w) = w^a``; the
    representation itself only sees ``a mod d`` (``rho_exponents``).
    """

    d: int
    delta_exponents: tuple[int, ...]
    element: LaurentMatrix

    def __post_init__(self):
        object.__setattr__(self, "delta_exponents", tuple(int(a) for a in self.delta_exponents))
        if self.element.var != "w":
            raise DescentError("equivariant data lives in the w variable")
        bad = equivariance_violation(self.element, self.cls)
        if bad is not None:
            raise bad

    @property
    def cls(self) -> EquivarianceClass:
        return EquivarianceClass(self.d, self.delta_exponents)

    @property
    def rho_exponents(self) -> tuple[int, ...]:
        return self.cls.rho_exponents

    @property
    def theta(self) -> Weight:
        return self.cls.theta

    def __matmul__(self, other: "EquivariantLocalDatum") -> "EquivariantLocalDatum":
        _same_type(self, other)
        return EquivariantLocalDatum(self.d, self.delta_exponents, self.element @ other.element)

    def __add__(self, other: "EquivariantLocalDatum") -> "EquivariantLocalDatum":
        _same_type(self, other)
        return EquivariantLocalDatum(self.d, self.delta_exponents, self.element + other.element)


@dataclass(frozen=True)
class ParahoricLocalDatum:
    theta: Weight
    element: LaurentMatrix

    def __post_init__(self):
        if self.element.var != "z":
            raise DescentError("parahoric data lives in the z variable")

    @property
    def profile(self) -> PoleProfile:
        return profile(None, self.theta)

    def is_valid(self) -> bool:
        if self.element.kind == "group":
            return is_member(self.element, self.profile)
        return is_higgs_member(self.element, self.profile)

    def __matmul__(self, other: "ParahoricLocalDatum") -> "ParahoricLocalDatum":
        if self.theta != other.theta:
            raise DescentError("weights differ")
        return ParahoricLocalDatum(self.theta, self.element @ other.element)


def _same_type(a: EquivariantLocalDatum, b: EquivariantLocalDatum) -> None:
    if a.d != b.d or a.delta_exponents != b.delta_exponents:
        raise DescentError("equivariant data of different types")


def _explain_membership(m: LaurentMatrix, p: PoleProfile) -> str:
    bad = bound_violations(m, p)
    if bad:
        i, j, k, b = bad[0]
        return f"entry ({i + 1},{j + 1}) has exponent {k} below bound {b}"
    return "limit at the origin is not invertible"


def to_parahoric(e: EquivariantLocalDatum) -> ParahoricLocalDatum:
    out = ParahoricLocalDatum(e.theta, descend(e.element, e.cls))
    if not out.is_valid():
        raise DescentError(
            "descended element is not in the parahoric group: "
            + _explain_membership(out.element, out.profile)
        )
    return out


def from_parahoric(p: ParahoricLocalDatum, d: int | None = None) -> EquivariantLocalDatum:
    d = p.theta.denominator if d is None else int(d)
    try:
        cls = EquivarianceClass.from_weight(p.theta, d)
    except LaurentError as exc:
        raise DescentError(f"cover order {d} does not clear the weight denominators") from exc
    return EquivariantLocalDatum(d, cls.exponents, lift(p.element, cls))


def automorphism_transport_check(e1: EquivariantLocalDatum, e2: EquivariantLocalDatum) -> bool:
    """Descent of a product equals the product of descents."""
    _same_type(e1, e2)
    return to_parahoric(e1 @ e2).element == (to_parahoric(e1) @ to_parahoric(e2)).element
