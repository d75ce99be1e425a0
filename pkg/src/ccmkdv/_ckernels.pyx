# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: batched Pfaffians and centered exponential sums."""

import numpy as np
cimport numpy as cnp
from cython.parallel cimport prange
from libc.math cimport exp, cos, sin

cnp.import_array()

ctypedef double complex cplx


cdef inline double cabs2(cplx z) nogil:
    return z.real * z.real + z.imag * z.imag


cdef cplx _pfaffian_inplace(cplx[:, ::1] a) nogil:
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t k, i, j, kp
    cdef double best, m
    cdef cplx pf = 1.0
    cdef cplx piv, tmp, ti, tj
    if n % 2:
        return 0.0
    k = 0
    while k < n - 1:
        kp = k + 1
        best = cabs2(a[k + 1, k])
        for i in range(k + 2, n):
            m = cabs2(a[i, k])
            if m > best:
                best = m
                kp = i
        if kp != k + 1:
            for j in range(n):
                tmp = a[k + 1, j]
                a[k + 1, j] = a[kp, j]
                a[kp, j] = tmp
            for i in range(n):
                tmp = a[i, k + 1]
                a[i, k + 1] = a[i, kp]
                a[i, kp] = tmp
            pf = -pf
        if a[k + 1, k] == 0:
            return 0.0
        piv = a[k, k + 1]
        pf = pf * piv
        if k + 2 < n:
            # tau_i = a[k, i] / piv; a[i, j] += tau_i a[j, k+1] - a[i, k+1] tau_j
            for i in range(k + 2, n):
                ti = a[k, i] / piv
                for j in range(k + 2, n):
                    tj = a[k, j] / piv
                    a[i, j] = a[i, j] + ti * a[j, k + 1] - a[i, k + 1] * tj
        k += 2
    return pf


def pfaffian_ltl(a):
    cdef cplx[:, ::1] w = np.array(a, dtype=np.complex128, order="C", copy=True)
    return complex(_pfaffian_inplace(w))


def pfaffian_ltl_batch(a):
    cdef cplx[:, :, ::1] w = np.array(a, dtype=np.complex128, order="C", copy=True)
    cdef Py_ssize_t m, nb = w.shape[0]
    out = np.empty(nb, dtype=np.complex128)
    cdef cplx[::1] o = out
    for m in prange(nb, nogil=True, schedule="static"):
        o[m] = _pfaffian_inplace(w[m])
    return out


def expsum_max_exponent(kx, kt, x, t):
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[::1] tv = np.ascontiguousarray(t, dtype=np.float64)
    cdef const double[::1] kxr = np.ascontiguousarray(np.asarray(kx).real, dtype=np.float64)
    cdef const double[::1] ktr = np.ascontiguousarray(np.asarray(kt).real, dtype=np.float64)
    cdef Py_ssize_t p, k, npts = xv.shape[0], nt = kxr.shape[0]
    cdef double e, best
    out = np.zeros(npts, dtype=np.float64)
    cdef double[::1] o = out
    if nt == 0:
        return out
    for p in prange(npts, nogil=True, schedule="static"):
        best = kxr[0] * xv[p] + ktr[0] * tv[p]
        for k in range(1, nt):
            e = kxr[k] * xv[p] + ktr[k] * tv[p]
            if e > best:
                best = e
        o[p] = best
    return out


def expsum_jet(coeff, kx, kt, x, t, shift, int amax, int bmax):
    if amax < 0 or bmax < 0:
        raise ValueError("jet orders must be non-negative")
    # split into real and imaginary parts once; the inner loop is real arithmetic
    cdef const double[:, ::1] c = np.ascontiguousarray(
        np.column_stack([np.real(coeff), np.imag(coeff)]), dtype=np.float64)
    cdef const double[:, ::1] kxv = np.ascontiguousarray(np.column_stack([np.real(kx), np.imag(kx)]), dtype=np.float64)
    cdef const double[:, ::1] ktv = np.ascontiguousarray(np.column_stack([np.real(kt), np.imag(kt)]), dtype=np.float64)
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[::1] tv = np.ascontiguousarray(t, dtype=np.float64)
    cdef const double[::1] sv = np.ascontiguousarray(shift, dtype=np.float64)
    cdef Py_ssize_t npts = xv.shape[0], nt = c.shape[0]
    cdef Py_ssize_t p, k, a, b
    cdef int na = amax + 1, nb = bmax + 1
    cdef double mag, ph, wr, wi, br, bi, ar, ai, tmp
    out = np.zeros((npts, na, nb), dtype=np.complex128)
    cdef double[:, :, ::1] o = out.view(np.float64).reshape(npts, na, 2 * nb)
    if nt == 0:
        return out
    for p in prange(npts, nogil=True, schedule="static"):
        for k in range(nt):
            mag = exp(kxv[k, 0] * xv[p] + ktv[k, 0] * tv[p] - sv[p])
            ph = kxv[k, 1] * xv[p] + ktv[k, 1] * tv[p]
            wr = mag * cos(ph)
            wi = mag * sin(ph)
            tmp = c[k, 0] * wr - c[k, 1] * wi
            wi = c[k, 0] * wi + c[k, 1] * wr
            wr = tmp
            br = wr
            bi = wi
            for b in range(nb):
                ar = br
                ai = bi
                for a in range(na):
                    # output rows are per point, so threads never share them
                    o[p, a, 2 * b] += ar
                    o[p, a, 2 * b + 1] += ai
                    tmp = ar * kxv[k, 0] - ai * kxv[k, 1]
                    ai = ar * kxv[k, 1] + ai * kxv[k, 0]
                    ar = tmp
                tmp = br * ktv[k, 0] - bi * ktv[k, 1]
                bi = br * ktv[k, 1] + bi * ktv[k, 0]
                br = tmp
    return out
