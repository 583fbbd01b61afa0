import pytest
from hypothesis import given, settings, strategies as st

from ogcomplex.errors import ResourceLimitExceeded
from ogcomplex.linalg import DEFAULT_PRIMES, rank_mod_p, rational_rank
from ogcomplex.sparse import ExactSparseMatrix, block, read_matrix, write_matrix


def test_matrix_invariants():
    with pytest.raises(ValueError):
        ExactSparseMatrix(2, 2, ((0, 0, 0),))
    with pytest.raises(ValueError):
        ExactSparseMatrix(2, 2, ((0, 0, 1), (0, 0, 2)))
    with pytest.raises(ValueError):
        ExactSparseMatrix(2, 2, ((2, 0, 1),))


def test_arithmetic():
    a = ExactSparseMatrix.from_dense([[1, 2], [0, 3]])
    b = ExactSparseMatrix.from_dense([[0, 1], [1, 0]])
    assert (a @ b).to_dense() == [[2, 1], [3, 0]]
    assert (a - a).is_zero()
    assert a.transpose().transpose() == a
    assert (a + b).to_dense() == [[1, 3], [1, 3]]
    m = block([[a, None], [None, b]], [2, 2], [2, 2])
    assert m.to_dense()[3] == [0, 0, 1, 0]


def test_coordinate_text_round_trip(tmp_path):
    a = ExactSparseMatrix.from_dense([[1, 0, -2], [0, 0, 5]])
    text = a.to_coordinate_text()
    assert text.splitlines()[0] == "2 3 3"
    assert text.splitlines()[1] == "1 1 1"
    assert ExactSparseMatrix.from_coordinate_text(text) == a
    path = tmp_path / "m.txt"
    write_matrix(a, path, {"d": 3})
    back, meta = read_matrix(path)
    assert back == a and meta["d"] == 3 and meta["shape"] == [2, 3]


def test_rank_examples():
    assert rank_mod_p(ExactSparseMatrix.zero(3, 4), DEFAULT_PRIMES[0]) == 0
    perm = ExactSparseMatrix.from_dense([[0, 1, 0], [0, 0, 1], [1, 0, 0]])
    assert rank_mod_p(perm, DEFAULT_PRIMES[1]) == 3
    assert rational_rank(ExactSparseMatrix.from_dense([[2, 0, 0], [0, 4, 0], [0, 0, 6]])) == 3
    assert rational_rank(ExactSparseMatrix.from_dense([[1, 2], [2, 4]])) == 1


def test_small_prime_rejected():
    with pytest.raises(ValueError):
        rank_mod_p(ExactSparseMatrix.zero(1, 1), 101)


def test_rational_guard():
    with pytest.raises(ResourceLimitExceeded):
        rational_rank(ExactSparseMatrix.identity(1000))


def test_unlucky_prime_detected_by_second_prime():
    p = DEFAULT_PRIMES[0]
    m = ExactSparseMatrix.from_dense([[1, 1], [1, 1 + p]])
    assert rank_mod_p(m, p) == 1
    assert rank_mod_p(m, DEFAULT_PRIMES[1]) == 2 == rational_rank(m)


@st.composite
def sparse_matrices(draw):
    rows = draw(st.integers(0, 30))
    cols = draw(st.integers(0, 30))
    cells = draw(
        st.dictionaries(
            st.tuples(st.integers(0, max(rows - 1, 0)), st.integers(0, max(cols - 1, 0))),
            st.integers(-3, 3),
            max_size=80,
        )
    )
    if not rows or not cols:
        return ExactSparseMatrix.zero(rows, cols)
    return ExactSparseMatrix.from_dict(rows, cols, cells)


@settings(max_examples=80, deadline=None)
@given(sparse_matrices())
def test_modular_rank_matches_rational(m):
    r = rational_rank(m)
    for p in DEFAULT_PRIMES:
        assert rank_mod_p(m, p) == r
    assert rank_mod_p(m.transpose(), DEFAULT_PRIMES[0]) == r


@settings(max_examples=40, deadline=None)
@given(sparse_matrices(), sparse_matrices())
def test_rank_of_product_bounded(a, b):
    if a.cols != b.rows:
        b = ExactSparseMatrix.zero(a.cols, b.cols)
    r = rational_rank(a @ b)
    assert r <= min(rational_rank(a), rational_rank(b))
