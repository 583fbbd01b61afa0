from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ogcomplex.basis import enumerate_basis
from ogcomplex.complexes import Chain, differential
from ogcomplex.graphs import new_graph
from ogcomplex.liealg import (
    ExtElement,
    bracket,
    degree,
    derivation_defect,
    ext_bracket,
    insert,
    iota_defect,
    jacobi_defect,
    split_differential,
    transpose_check,
    unit_jacobi_defect,
)

G2 = new_graph(2, [(0, 1), (0, 1)])
EDGE = new_graph(2, [(0, 1)])


def _pool(d, slices):
    return [c.canonical for v, e in slices for c in enumerate_basis(d, v, e).classes]


POOL3 = _pool(3, [(2, 2), (2, 3), (3, 4), (3, 5)])
POOL2 = _pool(2, [(3, 4), (4, 5)])
SMALL3 = _pool(3, [(2, 2), (2, 3), (3, 4)])


def test_degrees():
    assert degree(G2, 3) == 3 * 1 - 2 * 2
    assert degree(EDGE, 2) == 2 - 1


def test_insertion_into_double_edge():
    ch = insert(G2, G2, 3)
    assert all(g.n == 3 and len(g.edges) == 4 for g in ch.terms)
    assert not ch.is_zero()


def test_unit_rules():
    one = ExtElement(Fraction(1), Chain(3))
    assert ext_bracket(one, one, 3) == ExtElement(Fraction(0), Chain(3))
    for c in enumerate_basis(3, 3, 4).classes:
        g = ExtElement(Fraction(0), Chain(3, {c.canonical: 1}))
        assert ext_bracket(one, g, 3).body == Chain(3, {c.canonical: -2})
        assert ext_bracket(g, one, 3).body == Chain(3, {c.canonical: 2})


@pytest.mark.parametrize("d,v,e", [(2, 3, 4), (2, 4, 5), (3, 3, 4), (3, 4, 6), (3, 4, 5)])
def test_splitting_is_weighted_transpose(d, v, e):
    assert transpose_check(d, v, e)


def test_splitting_matches_bracket_with_edge():
    for g in POOL3[:8]:
        s = split_differential(g, 3)
        full = bracket(g, EDGE, 3)
        assert all(full.terms.get(h) == x for h, x in s.terms.items())


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(POOL3), st.sampled_from(POOL3))
def test_antisymmetry(x, y):
    k = -1 if (degree(x, 3) * degree(y, 3)) % 2 else 1
    assert bracket(x, y, 3) == bracket(y, x, 3).scaled(-k)


@settings(max_examples=10, deadline=None)
@given(st.sampled_from(SMALL3), st.sampled_from(SMALL3), st.sampled_from(SMALL3))
def test_jacobi(x, y, z):
    assert jacobi_defect(x, y, z, 3).is_zero()


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(POOL3), st.sampled_from(POOL3))
def test_derivation_and_iota_odd(x, y):
    assert derivation_defect(x, y, 3).is_zero()
    assert iota_defect(x, y, 3).is_zero()


@settings(max_examples=8, deadline=None)
@given(st.sampled_from(POOL2), st.sampled_from(POOL2))
def test_derivation_and_iota_even(x, y):
    assert derivation_defect(x, y, 2).is_zero()
    assert iota_defect(x, y, 2).is_zero()


def test_split_differential_squares_to_zero():
    for g in POOL3:
        assert split_differential(split_differential(g, 3), 3).is_zero()


def test_contraction_lowers_what_splitting_raises():
    for g in POOL3[:6]:
        for h in split_differential(g, 3).terms:
            assert g in differential(h, 3).terms


def test_unit_is_not_a_derivation():
    for x, y in zip(POOL3[:5], POOL3[5:10]):
        assert unit_jacobi_defect(x, y, 3) == bracket(x, y, 3).scaled(-2)
