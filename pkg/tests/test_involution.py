import pytest

from ogcomplex.basis import FULL, MINUS, PLUS, SKELETON1, enumerate_basis
from ogcomplex.complexes import differential_matrix
from ogcomplex.errors import NotAChainMap
from ogcomplex.graphs import ZERO, new_graph
from ogcomplex.involution import (
    commutes_with_differential,
    iota,
    iota_matrix,
    is_involution,
    minus_relation_check,
    restrict,
    split_basis,
)
from ogcomplex.sparse import ExactSparseMatrix

G2 = new_graph(2, [(0, 1), (0, 1)])


def test_double_edge_is_plus():
    sc = iota(G2, 3)
    assert sc is not ZERO and sc.cls.canonical == G2 and sc.coefficient == 1
    sp = split_basis(enumerate_basis(3, 2, 2))
    assert len(sp.plus) == 1 and not sp.minus
    assert not minus_relation_check(G2, 3)


SLICES = [(d, v, e) for d in (2, 3) for v in range(2, 6) for e in range(v, 8) if len(enumerate_basis(d, v, e))]


@pytest.mark.parametrize("d,v,e", SLICES)
def test_involution_laws_full(d, v, e):
    s = enumerate_basis(d, v, e)
    assert is_involution(s)
    assert commutes_with_differential(d, v, e)
    sp = split_basis(s)
    assert len(sp.plus) + len(sp.minus) == len(s)
    fixed_minus = {vec[0][0] for vec in sp.minus if len(vec) == 1}
    for i, c in enumerate(s.classes):
        img = iota(c, d)
        if img.cls.canonical == c.canonical:
            assert minus_relation_check(c, d) == (i in fixed_minus)
        else:
            assert not minus_relation_check(c, d)


@pytest.mark.parametrize("d", [2, 3])
def test_involution_laws_reduced(d):
    for v in range(2, 10):
        s = enumerate_basis(d, v, v + 2, SKELETON1)
        if len(s):
            assert is_involution(s)
            assert commutes_with_differential(d, v, v + 2, SKELETON1)


def test_eigenvectors():
    s = enumerate_basis(3, 4, 6)
    a = iota_matrix(s)
    sp = split_basis(s)
    for part, sign in ((PLUS, 1), (MINUS, -1)):
        m = sp.matrix(part)
        assert (a @ m - m.scale(sign)).is_zero()


def test_block_structure():
    for part in (PLUS, MINUS):
        m = differential_matrix(3, 5, 7, FULL, part)
        assert m.cols == len(split_basis(enumerate_basis(3, 5, 7)).part(part)[0])


def test_restrict_rejects_mixing_map():
    s = enumerate_basis(3, 4, 6)
    sp = split_basis(s)
    plus_cols = {vec[0][0] for vec in sp.plus}
    minus_cols = {vec[0][0] for vec in sp.minus if len(vec) == 1}
    if not minus_cols:
        pytest.skip("no fixed minus class here")
    i, j = min(plus_cols), min(minus_cols)
    m = ExactSparseMatrix.from_dict(len(s), len(s), {(j, i): 1})
    with pytest.raises(NotAChainMap):
        restrict(m, sp, sp, PLUS)
