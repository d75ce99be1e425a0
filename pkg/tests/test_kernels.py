import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ccmkdv import _kernels, _kernels_py

IMPLS = _kernels.available()


def random_skew(rng, n, batch=None):
    shape = (n, n) if batch is None else (batch, n, n)
    a = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    return a - np.swapaxes(a, -1, -2)


def test_selected_backend_is_reported():
    assert _kernels.BACKEND in IMPLS
    assert "python" in IMPLS


@pytest.mark.parametrize("name", sorted(IMPLS))
@pytest.mark.parametrize("n", [0, 2, 4, 6, 10])
def test_pfaffian_squared_is_det(name, n, rng):
    impl = IMPLS[name]
    a = random_skew(rng, n)
    pf = impl.pfaffian_ltl(a)
    det = np.linalg.det(a) if n else 1.0
    assert abs(pf * pf - det) <= 1e-10 * max(1.0, abs(det))


@pytest.mark.parametrize("name", sorted(IMPLS))
def test_odd_order_vanishes(name, rng):
    a = random_skew(rng, 5)
    assert IMPLS[name].pfaffian_ltl(a) == 0


@pytest.mark.parametrize("name", sorted(IMPLS))
def test_batch_matches_single(name, rng):
    impl = IMPLS[name]
    a = random_skew(rng, 6, batch=7)
    batch = impl.pfaffian_ltl_batch(a)
    single = np.array([impl.pfaffian_ltl(m) for m in a])
    np.testing.assert_allclose(batch, single, rtol=1e-13)


def test_input_not_modified(rng):
    for impl in IMPLS.values():
        a = random_skew(rng, 6)
        keep = a.copy()
        impl.pfaffian_ltl(a)
        np.testing.assert_array_equal(a, keep)


def test_zero_column_gives_zero():
    a = np.zeros((4, 4), dtype=complex)
    a[0, 1], a[1, 0] = 1, -1
    for impl in IMPLS.values():
        assert impl.pfaffian_ltl(a) == 0


def _expsum_inputs(rng, nterms=6, npts=50):
    c = rng.normal(size=nterms) + 1j * rng.normal(size=nterms)
    kx = rng.normal(size=nterms) + 1j * rng.normal(size=nterms)
    kt = rng.normal(size=nterms) + 1j * rng.normal(size=nterms)
    x = rng.uniform(-5, 5, npts)
    t = rng.uniform(-2, 2, npts)
    return c, kx, kt, x, t


@pytest.mark.parametrize("name", sorted(IMPLS))
def test_expsum_jet_against_direct_sum(name, rng):
    c, kx, kt, x, t = _expsum_inputs(rng)
    impl = IMPLS[name]
    shift = impl.expsum_max_exponent(kx, kt, x, t)
    jet = impl.expsum_jet(c, kx, kt, x, t, shift, 3, 1)
    e = np.exp(np.outer(x, kx) + np.outer(t, kt) - shift[:, None])
    for a in range(4):
        for b in range(2):
            direct = (e * c * kx ** a * kt ** b).sum(axis=1)
            np.testing.assert_allclose(jet[:, a, b], direct, rtol=1e-12, atol=1e-14)


def test_implementations_agree(rng):
    if len(IMPLS) < 2:
        pytest.skip("compiled kernels not built")
    c, kx, kt, x, t = _expsum_inputs(rng, nterms=40, npts=300)
    py, cy = IMPLS["python"], IMPLS["cython"]
    np.testing.assert_allclose(py.expsum_max_exponent(kx, kt, x, t), cy.expsum_max_exponent(kx, kt, x, t), rtol=1e-15)
    s = py.expsum_max_exponent(kx, kt, x, t)
    np.testing.assert_allclose(py.expsum_jet(c, kx, kt, x, t, s, 3, 1), cy.expsum_jet(c, kx, kt, x, t, s, 3, 1),
                               rtol=1e-12, atol=1e-13)
    a = random_skew(rng, 8, batch=20)
    np.testing.assert_allclose(py.pfaffian_ltl_batch(a), cy.pfaffian_ltl_batch(a), rtol=1e-11)


def test_max_exponent_empty():
    for impl in IMPLS.values():
        out = impl.expsum_max_exponent(np.zeros(0, complex), np.zeros(0, complex), np.ones(3), np.ones(3))
        np.testing.assert_array_equal(out, 0.0)


@given(st.integers(min_value=1, max_value=5), st.integers(min_value=0, max_value=2 ** 31 - 1))
def test_pfaffian_transforms_with_congruence(half, seed):
    # Pf(B A B^T) = det(B) Pf(A)
    rng = np.random.default_rng(seed)
    n = 2 * half
    a = random_skew(rng, n)
    b = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    for impl in IMPLS.values():
        lhs = impl.pfaffian_ltl(b @ a @ b.T)
        rhs = np.linalg.det(b) * impl.pfaffian_ltl(a)
        assert abs(lhs - rhs) <= 1e-8 * max(1.0, abs(rhs))


def test_python_module_is_importable_without_extension():
    assert callable(_kernels_py.pfaffian_ltl)
