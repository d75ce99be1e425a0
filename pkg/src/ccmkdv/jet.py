"""Truncated bivariate Taylor jets in (x, t).

A :class:`Jet` carries the normalized Taylor coefficients
``c[a, b] = d^a/dx^a d^b/dt^b f / (a! b!)`` for ``a <= 3`` and ``b <= 1``,
vectorized over any leading batch shape.  Products drop every monomial beyond
the truncation, which is exactly the chain rule up to those orders.
"""

from __future__ import annotations

from math import factorial

import numpy as np

AMAX = 3
BMAX = 1

_FACT = np.array([[factorial(a) * factorial(b) for b in range(BMAX + 1)]
                  for a in range(AMAX + 1)], dtype=np.float64)


class Jet:
    __slots__ = ("c",)
    __array_priority__ = 100

    def __init__(self, coeffs):
        c = np.asarray(coeffs, dtype=np.complex128)
        if c.shape[-2:] != (AMAX + 1, BMAX + 1):
            raise ValueError(f"jet coefficients must end in shape {(AMAX + 1, BMAX + 1)}, got {c.shape}")
        self.c = c

    @classmethod
    def from_derivatives(cls, d) -> "Jet":
        """Build from raw partials ``d[..., a, b] = d^a_x d^b_t f``."""
        return cls(np.asarray(d, dtype=np.complex128) / _FACT)

    @classmethod
    def constant(cls, value) -> "Jet":
        value = np.asarray(value, dtype=np.complex128)
        c = np.zeros(value.shape + (AMAX + 1, BMAX + 1), dtype=np.complex128)
        c[..., 0, 0] = value
        return cls(c)

    @classmethod
    def exp_linear(cls, kx, kt, x, t, shift=0.0) -> "Jet":
        """Jet of ``exp(kx*x + kt*t - shift)``, broadcast over x and t."""
        kx = np.asarray(kx, dtype=np.complex128)
        kt = np.asarray(kt, dtype=np.complex128)
        x = np.asarray(x, dtype=np.float64)
        t = np.asarray(t, dtype=np.float64)
        val = np.exp(kx * x + kt * t - shift)
        d = val[..., None, None] * (kx ** np.arange(AMAX + 1))[..., :, None] \
            * (kt ** np.arange(BMAX + 1))[..., None, :]
        return cls.from_derivatives(d)

    @property
    def value(self) -> np.ndarray:
        return self.c[..., 0, 0]

    def derivative(self, a: int, b: int = 0) -> np.ndarray:
        return self.c[..., a, b] * _FACT[a, b]

    def derivatives(self) -> np.ndarray:
        return self.c * _FACT

    def _coerce(self, other):
        if isinstance(other, Jet):
            return other
        return Jet.constant(other)

    def __add__(self, other):
        return Jet(self.c + self._coerce(other).c)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.c)

    def __sub__(self, other):
        return Jet(self.c - self._coerce(other).c)

    def __rsub__(self, other):
        return Jet(self._coerce(other).c - self.c)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c * np.asarray(other)[..., None, None])
        A, B = self.c, other.c
        out = np.zeros(np.broadcast_shapes(A.shape, B.shape), dtype=np.complex128)
        for i in range(AMAX + 1):
            for j in range(BMAX + 1):
                for a in range(i, AMAX + 1):
                    for b in range(j, BMAX + 1):
                        out[..., a, b] += A[..., i, j] * B[..., a - i, b - j]
        return Jet(out)

    __rmul__ = __mul__

    def _nilpotent_series(self, coeffs):
        """Evaluate sum_k coeffs[k] h^k with h the non-constant part of self."""
        h = Jet(self.c.copy())
        h.c[..., 0, 0] = 0
        total = Jet.constant(np.full(self.c.shape[:-2], coeffs[0], dtype=np.complex128))
        power = None
        for k in range(1, len(coeffs)):
            power = h if power is None else power * h
            total = total + power * coeffs[k]
        return total

    def reciprocal(self) -> "Jet":
        a0 = self.value
        h = Jet(self.c / a0[..., None, None])
        # 1/(1 + h) = sum (-h)^k; h^5 vanishes at total order AMAX + BMAX = 4
        series = h._nilpotent_series([(-1.0) ** k for k in range(AMAX + BMAX + 1)])
        return Jet(series.c / a0[..., None, None])

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c / np.asarray(other)[..., None, None])
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.reciprocal()

    def exp(self) -> "Jet":
        a0 = self.value
        series = self._nilpotent_series([1.0 / factorial(k) for k in range(AMAX + BMAX + 1)])
        return Jet(series.c * np.exp(a0)[..., None, None])

    def conj(self) -> "Jet":
        """Complex conjugate; derivatives in real x, t commute with conjugation."""
        return Jet(np.conj(self.c))

    def abs2(self) -> "Jet":
        return self * self.conj()

    def __getitem__(self, key):
        if not isinstance(key, tuple):
            key = (key,)
        return Jet(self.c[key + (slice(None), slice(None))])

    def __repr__(self):
        return f"Jet(shape={self.c.shape[:-2]}, value={self.value!r})"
