import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ccmkdv.errors import ConfigError, NonFiniteResultError, OrderBoundError
from ccmkdv.pfaffian import SkewMatrix, perfect_matchings, pfaffian_batch, pfaffian_expand, pfaffian_ltl


def random_skew(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return a - a.T


def test_two_by_two():
    m = SkewMatrix.from_upper([3 + 1j])
    assert pfaffian_expand(m) == 3 + 1j
    assert pfaffian_ltl(m) == pytest.approx(3 + 1j)


def test_four_by_four_formula():
    a12, a13, a14, a23, a24, a34 = 2.0, -1.0, 0.5, 3.0, 1.5, -2.0
    m = SkewMatrix.from_upper([a12, a13, a14, a23, a24, a34])
    want = a12 * a34 - a13 * a24 + a14 * a23
    assert pfaffian_expand(m) == pytest.approx(want)
    assert pfaffian_ltl(m) == pytest.approx(want)


def test_empty_matrix_is_one():
    m = SkewMatrix.from_upper([])
    assert m.order == 0
    assert pfaffian_ltl(m) == 1
    assert pfaffian_expand(m) == 1


def test_odd_order_rejected():
    with pytest.raises(ConfigError):
        SkewMatrix.from_dense(np.zeros((3, 3)))


def test_non_skew_rejected_when_checked():
    with pytest.raises(ConfigError):
        SkewMatrix.from_dense(np.ones((2, 2)), check=True)


def test_lower_triangle_ignored_by_default():
    a = np.array([[0, 2.0], [7.0, 0]])
    assert pfaffian_ltl(SkewMatrix.from_dense(a)) == 2.0


def test_dense_roundtrip(rng):
    a = random_skew(rng, 6)
    m = SkewMatrix.from_dense(a)
    np.testing.assert_array_equal(m.dense(), a)
    assert m[1, 0] == -m[0, 1]
    assert m[2, 2] == 0


def test_storage_is_read_only(rng):
    m = SkewMatrix.from_dense(random_skew(rng, 4))
    with pytest.raises(ValueError):
        m.upper[0] = 1.0


def test_order_bound():
    m = SkewMatrix.from_dense(np.zeros((14, 14)))
    with pytest.raises(OrderBoundError):
        pfaffian_expand(m)
    assert pfaffian_expand(m, max_order=14) == 0


def test_non_finite_entry():
    a = np.zeros((4, 4), dtype=complex)
    a[0, 1], a[1, 0] = np.inf, -np.inf
    with pytest.raises(NonFiniteResultError):
        pfaffian_ltl(a)


@pytest.mark.parametrize("n", [0, 2, 4, 6, 8])
def test_matching_count(n):
    assert sum(1 for _ in perfect_matchings(n)) == (math.prod(range(1, n, 2)) if n else 1)


def test_matchings_are_lexicographic_and_signed():
    got = list(perfect_matchings(4))
    assert [pairs for _, pairs in got] == [((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))]
    assert [s for s, _ in got] == [1, -1, 1]


@pytest.mark.parametrize("n", [2, 4, 6, 8, 10, 12])
def test_algorithms_agree(n, rng):
    for _ in range(5):
        a = random_skew(rng, n)
        m = SkewMatrix.from_dense(a)
        e, l = pfaffian_expand(m), pfaffian_ltl(m)
        assert abs(e - l) <= 1e-10 * max(1.0, abs(e))
        assert abs(l * l - np.linalg.det(a)) <= 1e-9 * max(1.0, abs(np.linalg.det(a)))


def test_batch(rng):
    a = np.stack([random_skew(rng, 6) for _ in range(4)])
    np.testing.assert_allclose(pfaffian_batch(a), [pfaffian_ltl(m) for m in a], rtol=1e-13)


@given(st.integers(1, 4), st.floats(-3, 3).filter(lambda v: abs(v) > 1e-3), st.integers(0, 10 ** 6))
def test_homogeneity(half, c, seed):
    a = random_skew(np.random.default_rng(seed), 2 * half)
    assert pfaffian_ltl(c * a) == pytest.approx(c ** half * pfaffian_ltl(a), rel=1e-9, abs=1e-12)


@given(st.integers(1, 4), st.integers(0, 10 ** 6))
def test_row_column_swap_flips_sign(half, seed):
    a = random_skew(np.random.default_rng(seed), 2 * half + 2)
    perm = np.arange(a.shape[0])
    perm[[0, 1]] = perm[[1, 0]]
    b = a[perm][:, perm]
    assert pfaffian_ltl(b) == pytest.approx(-pfaffian_ltl(a), rel=1e-9, abs=1e-12)


def test_block_diagonal_factorizes(rng):
    a, b = random_skew(rng, 4), random_skew(rng, 2)
    blk = np.zeros((6, 6), dtype=complex)
    blk[:4, :4], blk[4:, 4:] = a, b
    assert pfaffian_ltl(blk) == pytest.approx(pfaffian_ltl(a) * pfaffian_ltl(b), rel=1e-12)
