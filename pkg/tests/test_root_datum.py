from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from parahoric_lab.root_datum import (
    Character,
    ParabolicType,
    RootDatum,
    Weight,
    antidominant_ray_basis,
    as_fraction,
    decompose_in_rays,
    pairing,
    root_value,
)

F = Fraction
rationals = st.fractions(min_value=-5, max_value=5, max_denominator=6)


def vectors(n):
    return st.lists(rationals, min_size=n, max_size=n)


def test_as_fraction_forms():
    assert as_fraction("1/2") == F(1, 2)
    assert as_fraction(["-1", "2"]) == F(-1, 2)
    assert as_fraction(3) == 3
    with pytest.raises(TypeError):
        as_fraction(0.5)


def test_weight_basics():
    theta = Weight.of("1/2", "-1/3")
    assert theta.denominator == 6
    assert theta.scaled() == (3, -2)
    with pytest.raises(ValueError):
        theta.scaled(2)
    assert (theta + (1, 1)).coords == (F(3, 2), F(2, 3))


@pytest.mark.parametrize(
    "theta, chi, expected",
    [
        ((0, 0), (5, -7), 0),
        (("1/2", "-1/2"), (1, -1), 1),
        ((0, "1/2"), (1, 1), F(1, 2)),
    ],
)
def test_pairing_examples(theta, chi, expected):
    assert pairing(Weight.of(*theta), chi) == expected


def test_root_value_examples():
    gl2 = RootDatum.gl(2)
    assert root_value(Weight.of("1/2", "-1/2"), (1, -1), gl2) == 1
    assert root_value(Weight.zero(2), (-1, 1), gl2) == 0
    assert root_value(Weight.of(0, "1/2"), (1, -1)) == F(-1, 2)
    with pytest.raises(ValueError):
        root_value(Weight.zero(2), (1, 1), gl2)


def test_gl_and_sl_data():
    gl3 = RootDatum.gl(3)
    assert len(gl3.roots) == 6
    assert gl3.simple_roots == ((1, -1, 0), (0, 1, -1))
    assert gl3.center_basis == ((1, 1, 1),)
    sl3 = RootDatum.sl(3)
    assert sl3.roots == gl3.roots and sl3.center_basis == ()
    assert sl3.reduce_character((3, 2, 1)) == sl3.reduce_character((5, 4, 3))
    assert RootDatum.from_json(gl3.to_json()) == gl3


def test_root_datum_validation():
    with pytest.raises(ValueError):
        RootDatum(2, ((1, -1),), (), (), "custom")
    with pytest.raises(ValueError):
        RootDatum(2, ((0, 0),), (), (), "custom")


def test_parabolic_type():
    p = ParabolicType.from_blocks([[1], [2, 3]])
    assert p.block_sizes == (1, 2) and p.n == 3 and p.is_proper
    assert p.contains_root(0, 2) and not p.contains_root(2, 0)
    assert p.contains_root(1, 2) and p.contains_root(2, 1)
    q = ParabolicType((1, 2), opposite=True)
    assert q.contains_root(2, 0) and not q.contains_root(0, 2)
    with pytest.raises(ValueError):
        ParabolicType.from_blocks([[2], [1]])


@pytest.mark.parametrize(
    "blocks, ray",
    [
        ([[1], [2]], (-1, 1)),
        ([[1], [2, 3]], (-2, 1, 1)),
        ([[1, 2], [3]], (-1, -1, 2)),
    ],
)
def test_ray_examples(blocks, ray):
    rays = antidominant_ray_basis(ParabolicType.from_blocks(blocks))
    assert Character(ray) in rays


def test_rays_without_center_condition():
    rays = antidominant_ray_basis(ParabolicType((1, 1, 1)), center_trivial=False)
    assert [r.values for r in rays] == [(0, 1, 1), (0, 0, 1)]
    with pytest.raises(ValueError):
        antidominant_ray_basis(ParabolicType((3,)))


def test_antidominance_reading():
    p = ParabolicType((1, 1))
    assert Character((-1, 1)).is_antidominant(p)
    assert not Character((1, -1)).is_antidominant(p)
    assert not Character((0, 1)).is_antidominant(ParabolicType((2,)))


block_sizes = st.lists(st.integers(1, 3), min_size=2, max_size=4)


@given(block_sizes)
def test_rays_are_center_trivial_and_antidominant(sizes):
    p = ParabolicType(tuple(sizes))
    for ray in antidominant_ray_basis(p):
        assert sum(ray.values) == 0
        assert ray.is_antidominant(p)


@given(block_sizes, st.data())
def test_cone_coverage(sizes, data):
    p = ParabolicType(tuple(sizes))
    steps = data.draw(st.lists(st.integers(0, 5), min_size=p.r - 1, max_size=p.r - 1))
    lam = [0]
    for s in steps:
        lam.append(lam[-1] + s)
    total = sum(v * s for v, s in zip(lam, p.block_sizes))
    # shift to make the character center-trivial while keeping integrality
    lam = [p.n * v - total for v in lam]
    chi = Character.from_blocks(p, lam)
    coeffs = decompose_in_rays(p, chi)
    assert all(c >= 0 for c in coeffs)
    rays = antidominant_ray_basis(p)
    rebuilt = [sum((c * r.values[i] for c, r in zip(coeffs, rays)), F(0)) for i in range(p.n)]
    assert tuple(rebuilt) == chi.values


@given(st.integers(2, 4).flatmap(lambda n: st.tuples(vectors(n), vectors(n), vectors(n), rationals)))
def test_pairing_bilinear(args):
    a, b, chi, c = args
    ta, tb = Weight(tuple(a)), Weight(tuple(b))
    assert pairing(ta + tb, chi) == pairing(ta, chi) + pairing(tb, chi)
    scaled_chi = [c * x for x in chi]
    assert pairing(ta, scaled_chi) == c * pairing(ta, chi)
    assert pairing(ta, [x + y for x, y in zip(chi, b)]) == pairing(ta, chi) + pairing(ta, b)


@given(st.integers(2, 4).flatmap(vectors))
def test_root_value_antisymmetric(coords):
    theta = Weight(tuple(coords))
    datum = RootDatum.gl(theta.n)
    for r in datum.roots:
        assert root_value(theta, tuple(-x for x in r), datum) == -root_value(theta, r, datum)
