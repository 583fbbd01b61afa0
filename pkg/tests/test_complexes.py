import random

import pytest
from hypothesis import given, settings, strategies as st

import ogcomplex.complexes as cx
from ogcomplex.basis import SKELETON1, enumerate_basis
from ogcomplex.complexes import (
    Chain,
    contract_edge,
    differential,
    differential_matrix,
    dual_matrix,
    grade,
    square_is_zero,
)
from ogcomplex.errors import EdgeOutOfRange
from ogcomplex.graphs import ZERO, canonicalize, new_graph, perm_sign, relabel
from ogcomplex.linalg import rational_rank

G2 = new_graph(2, [(0, 1), (0, 1)])
G3 = new_graph(2, [(0, 1), (0, 1), (0, 1)])
FAN = new_graph(3, [(0, 1), (0, 2), (2, 1), (2, 1)])


def test_grading_examples():
    assert grade(3, 7, 9) == {"loop_order": 3, "degree_OG": 0, "degree_OGC": 0}
    assert grade(2, 4, 6)["degree_OG"] == 0
    for d in (2, 3):
        assert grade(d, 4, 6)["degree_OG"] + 1 == grade(d, 3, 5)["degree_OG"]


def test_contraction_examples():
    assert contract_edge(G2, 0, 3) is ZERO
    assert differential(G2, 3).is_zero()
    sc = contract_edge(FAN, 1, 3)
    assert sc.cls.canonical == G3 and abs(sc.coefficient) == 1
    assert contract_edge(FAN, 1, 2) is ZERO
    with pytest.raises(EdgeOutOfRange):
        contract_edge(FAN, 4, 3)


def test_fan_differential_lands_on_triple_edge():
    ch = differential(FAN, 3)
    assert set(ch.terms) == {G3}


def test_matrix_shapes():
    m = differential_matrix(3, 2, 2)
    assert (m.rows, m.cols) == (0, 1)
    m = differential_matrix(3, 4, 6)
    assert m.cols == len(enumerate_basis(3, 4, 6)) and m.rows == len(enumerate_basis(3, 3, 5))


@pytest.mark.parametrize("d", [2, 3])
def test_square_zero_small(d):
    for v in range(2, 6):
        for e in range(v - 1, 8):
            assert square_is_zero(d, v, e), (d, v, e)


@pytest.mark.parametrize("d", [2, 3])
def test_square_zero_reduced(d):
    for v in range(2, 8):
        assert square_is_zero(d, v, v + 2, SKELETON1)


def test_broken_sign_rule_is_detected(monkeypatch):
    real = cx.contract_labeled

    def unsigned(g, a, d):
        out = real(g, a, d)
        return None if out is None else (out[0], 1)

    monkeypatch.setattr(cx, "contract_labeled", unsigned)
    assert not all(square_is_zero(3, v, v + 2) for v in range(3, 7))


def test_dual_transpose():
    m = differential_matrix(3, 5, 7)
    assert dual_matrix(dual_matrix(m)) == m
    assert rational_rank(dual_matrix(m)) == rational_rank(m)


SAMPLES = [(d, c.canonical) for d, v, e in ((3, 4, 6), (2, 5, 7), (3, 5, 7)) for c in enumerate_basis(d, v, e).classes[:5]]


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(SAMPLES), st.randoms(use_true_random=False))
def test_differential_is_well_defined(sample, rnd):
    d, g = sample
    sigma = list(range(g.n))
    tau = list(range(len(g.edges)))
    rnd.shuffle(sigma)
    rnd.shuffle(tau)
    h = relabel(g, sigma, tau)
    sign = perm_sign(tau) if d % 2 == 0 else perm_sign(sigma)
    assert canonicalize(h, d).coefficient == sign
    assert differential(h, d) == differential(g, d).scaled(sign)


def test_chain_bookkeeping():
    ch = Chain(3)
    ch.add(G2, 2)
    ch.add(G2, -2)
    assert ch.is_zero()
    ch.add(G3, 1)
    assert ch.scaled(-3).terms == {G3: -3}
    assert ch.scaled(0).is_zero()
