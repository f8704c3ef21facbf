"""Parahoric pole profiles, equivariant descent and stability checks with exact arithmetic."""

from .root_datum import (
    Character,
    ParabolicType,
    RootDatum,
    Weight,
    antidominant_ray_basis,
    pairing,
    root_value,
)
from .laurent import EquivarianceClass, LaurentEntry, LaurentMatrix, descend, is_equivariant, lift, multiply
from .parahoric_local import (
    ParabolicProfile,
    PoleProfile,
    hecke_shift,
    is_higgs_member,
    is_liftable,
    is_member,
    profile,
)
from .descent import (
    EquivariantLocalDatum,
    ParahoricLocalDatum,
    automorphism_transport_check,
    from_parahoric,
    to_parahoric,
)
from .degree_stability import (
    ParabolicHiggsDatum,
    ReductionDatum,
    StabilityReport,
    canonical_mu,
    check_R,
    check_R_mu,
    check_slope,
    equivariant_degree,
    full_report,
    invariant_subsets,
    parabolic_degree,
    parahoric_degree,
)

__version__ = "0.1.0"
