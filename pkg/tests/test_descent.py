import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from parahoric_lab.descent import (
    DescentError,
    EquivariantLocalDatum,
    ParahoricLocalDatum,
    automorphism_transport_check,
    from_parahoric,
    to_parahoric,
)
from parahoric_lab.laurent import EquivarianceClass, LaurentMatrix, NotEquivariantError
from parahoric_lab.parahoric_local import is_higgs_member, is_member, profile
from parahoric_lab.root_datum import Weight

import gen

F = Fraction
HALF = Weight.of("1/2", "-1/2")


def W(rows, kind="group"):
    return LaurentMatrix.from_terms(rows, var="w", kind=kind)


def Z(rows, kind="group"):
    return LaurentMatrix.from_terms(rows, var="z", kind=kind)


def test_identity_descends_to_identity():
    e = EquivariantLocalDatum(3, (1, 2, 0), LaurentMatrix.identity(3, "w"))
    p = to_parahoric(e)
    assert p.theta == Weight.of("1/3", "2/3", 0)
    assert p.element == LaurentMatrix.identity(3)


def test_sl2_worked_case():
    # Delta = diag(w, 1/w); the (2,1) entry w^2 becomes w^4 = z^2
    e = EquivariantLocalDatum(2, (1, -1), W([[1, 0], [{2: 1}, 1]]))
    p = to_parahoric(e)
    assert p.element == Z([[1, 0], [{2: 1}, 1]])
    assert is_member(p.element, profile(None, HALF))


def test_sl2_higgs_worked_case():
    e = EquivariantLocalDatum(2, (1, -1), W([[1, 0], [{2: 1}, -1]], "higgs"))
    p = to_parahoric(e)
    assert p.element == Z([[F(1, 2), 0], [{2: F(1, 2)}, F(-1, 2)]], "higgs")
    assert p.element.form == "dz/z"
    assert from_parahoric(p, 2) == e


def test_from_parahoric_examples():
    assert from_parahoric(ParahoricLocalDatum(HALF, LaurentMatrix.identity(2))).element == (
        LaurentMatrix.identity(2, "w")
    )
    e = from_parahoric(ParahoricLocalDatum(HALF, Z([[1, {-1: 1}], [0, 1]])))
    assert e.element == W([[1, 1], [0, 1]])
    assert e.delta_exponents == (1, -1) and e.rho_exponents == (1, 1)


def test_remark_higgs_field_unchanged_at_zero_weight():
    phi = Z([[1, 0], [{1: 1}, -1]], "higgs")
    e = from_parahoric(ParahoricLocalDatum(Weight.zero(2), phi))
    assert e.d == 1 and e.element == phi.replace(var="w")
    assert to_parahoric(e).element == phi


def test_non_equivariant_input_rejected():
    with pytest.raises(NotEquivariantError, match=r"entry \(1,2\)"):
        EquivariantLocalDatum(2, (0, 1), W([[1, 1], [0, 1]]))


def test_descent_outside_group_reported():
    # equivariant, but the descended (1,2) entry z^-2 is below the bound -1
    e = EquivariantLocalDatum(2, (1, -1), W([[1, {-2: 1}], [0, 1]]))
    with pytest.raises(DescentError, match=r"entry \(1,2\) has exponent -2 below bound -1"):
        to_parahoric(e)


def test_cover_order_must_clear_denominators():
    with pytest.raises(DescentError):
        from_parahoric(ParahoricLocalDatum(HALF, LaurentMatrix.identity(2)), 3)


def test_transport_with_identity_and_inverse():
    e = EquivariantLocalDatum(2, (1, -1), W([[1, 1], [0, 1]]))
    one = EquivariantLocalDatum(2, (1, -1), LaurentMatrix.identity(2, "w"))
    assert automorphism_transport_check(e, one)
    inv = EquivariantLocalDatum(2, (1, -1), e.element.inverse())
    assert automorphism_transport_check(e, inv)
    assert to_parahoric(e @ inv).element.is_identity()


seeds = st.integers(0, 2**32 - 1)


@given(seeds, st.integers(1, 4), st.integers(1, 6))
def test_round_trip_from_below(seed, n, max_d):
    rng = random.Random(seed)
    p, d = gen.rand_parahoric_datum(rng, n, max_d)
    assert to_parahoric(from_parahoric(p, d)).element == p.element


@given(seeds, st.integers(1, 4), st.integers(1, 6))
def test_round_trip_from_above(seed, n, max_d):
    rng = random.Random(seed)
    e = gen.rand_equivariant_datum(rng, gen.rand_class(rng, n, max_d))
    assert from_parahoric(to_parahoric(e), e.d) == e


@given(seeds, st.integers(1, 3), st.integers(1, 4))
def test_homomorphism(seed, n, max_d):
    rng = random.Random(seed)
    cls = gen.rand_class(rng, n, max_d)
    assert automorphism_transport_check(gen.rand_equivariant_datum(rng, cls), gen.rand_equivariant_datum(rng, cls))


@given(seeds, st.integers(1, 4), st.integers(1, 6))
def test_higgs_transport_linear_and_member(seed, n, max_d):
    rng = random.Random(seed)
    cls = gen.rand_class(rng, n, max_d)
    a = gen.rand_equivariant_datum(rng, cls, kind="higgs")
    b = gen.rand_equivariant_datum(rng, cls, kind="higgs")
    down = to_parahoric(a + b)
    assert down.element == to_parahoric(a).element + to_parahoric(b).element
    assert is_higgs_member(down.element, profile(None, cls.theta))
    assert from_parahoric(down, cls.d) == a + b
