"""Pure NumPy implementations of the hot kernels.

These mirror ``_ckernels.pyx`` function for function and are used when the
compiled extension is unavailable or disabled with ``CCMKDV_PURE_PYTHON=1``.
"""

import numpy as np

_CHUNK = 4096


def pfaffian_ltl(a):
    """Pfaffian of one dense skew-symmetric matrix by Parlett-Reid elimination.

    The matrix is copied; the caller's array is not modified.
    """
    a = np.array(a, dtype=np.complex128, copy=True)
    n = a.shape[0]
    if n % 2:
        return 0j
    pf = 1.0 + 0j
    for k in range(0, n - 1, 2):
        # largest pivot in column k below the diagonal; argmax keeps the lowest index on ties
        kp = k + 1 + int(np.argmax(np.abs(a[k + 1:, k])))
        if kp != k + 1:
            a[[k + 1, kp], :] = a[[kp, k + 1], :]
            a[:, [k + 1, kp]] = a[:, [kp, k + 1]]
            pf = -pf
        if a[k + 1, k] == 0:
            return 0j
        pf *= a[k, k + 1]
        if k + 2 < n:
            tau = a[k, k + 2:] / a[k, k + 1]
            col = a[k + 2:, k + 1].copy()
            a[k + 2:, k + 2:] += np.outer(tau, col) - np.outer(col, tau)
    return complex(pf)


def pfaffian_ltl_batch(a):
    a = np.asarray(a, dtype=np.complex128)
    out = np.empty(a.shape[0], dtype=np.complex128)
    for m in range(a.shape[0]):
        out[m] = pfaffian_ltl(a[m])
    return out


def expsum_max_exponent(kx, kt, x, t):
    """Per point, the largest real part of ``kx*x + kt*t`` over the terms."""
    x = np.asarray(x, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    kxr = np.asarray(kx).real
    ktr = np.asarray(kt).real
    out = np.empty(x.shape[0], dtype=np.float64)
    if kxr.size == 0:
        out[:] = 0.0
        return out
    for s in range(0, x.shape[0], _CHUNK):
        e = np.multiply.outer(x[s:s + _CHUNK], kxr) + np.multiply.outer(t[s:s + _CHUNK], ktr)
        out[s:s + _CHUNK] = e.max(axis=1)
    return out


def expsum_jet(coeff, kx, kt, x, t, shift, amax, bmax):
    """Shifted derivative sums ``sum_k c_k kx^a kt^b exp(kx x + kt t - shift)``.

    Returns an array of shape ``(npts, amax + 1, bmax + 1)``.
    """
    coeff = np.asarray(coeff, dtype=np.complex128)
    kx = np.asarray(kx, dtype=np.complex128)
    kt = np.asarray(kt, dtype=np.complex128)
    x = np.asarray(x, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    shift = np.asarray(shift, dtype=np.float64)
    npts = x.shape[0]
    out = np.zeros((npts, amax + 1, bmax + 1), dtype=np.complex128)
    if coeff.size == 0:
        return out
    pa = kx[None, :] ** np.arange(amax + 1)[:, None]
    pb = kt[None, :] ** np.arange(bmax + 1)[:, None]
    weights = coeff[None, None, :] * pa[:, None, :] * pb[None, :, :]
    for s in range(0, npts, _CHUNK):
        e = (np.multiply.outer(x[s:s + _CHUNK], kx) + np.multiply.outer(t[s:s + _CHUNK], kt)
             - shift[s:s + _CHUNK, None])
        out[s:s + _CHUNK] = np.einsum("pk,abk->pab", np.exp(e), weights)
    return out
