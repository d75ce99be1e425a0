"""Finite sums of exponentials linear in (x, t).

An :class:`ExpSum` represents ``sum_k c_k exp(kx_k x + kt_k t)`` exactly.  The
class is closed under addition, multiplication, differentiation and Hirota
bilinear operators, so identities between tau functions can be assembled
symbolically and only evaluated at the end.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from . import _kernels
from .errors import NonFiniteResultError
from .jet import AMAX, BMAX, Jet

MERGE_ATOL = 1e-12
DROP_RTOL = 1e-14
# exp(709) is the largest finite double
SAFE_EXPONENT = 700.0


def _merge(coeff, kx, kt):
    """Merge terms whose exponent slopes agree to MERGE_ATOL, drop negligible ones."""
    n = coeff.size
    if n == 0:
        return coeff, kx, kt
    # cancellation is judged against the largest input term
    big = np.abs(coeff).max()
    keys = np.column_stack([kx.real, kx.imag, kt.real, kt.imag])
    tree = cKDTree(keys)
    pairs = tree.query_pairs(MERGE_ATOL, p=np.inf, output_type="ndarray")
    if len(pairs):
        graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n))
        ncomp, labels = connected_components(graph, directed=False)
        # representative slope = first member of each group, in input order
        first = np.full(ncomp, n, dtype=np.int64)
        np.minimum.at(first, labels, np.arange(n))
        c = np.zeros(ncomp, dtype=np.complex128)
        np.add.at(c, labels, coeff)
        order = np.argsort(first, kind="stable")
        coeff, kx, kt = c[order], kx[first[order]], kt[first[order]]
    keep = np.abs(coeff) >= DROP_RTOL * big if big > 0 else np.zeros(coeff.size, dtype=bool)
    return coeff[keep], kx[keep], kt[keep]


@dataclass(frozen=True, eq=False)
class ExpSum:
    """Immutable exponential sum; construct through :meth:`from_terms`."""

    coeff: np.ndarray
    kx: np.ndarray
    kt: np.ndarray

    @classmethod
    def from_terms(cls, coeff, kx, kt, merge: bool = True) -> "ExpSum":
        coeff = np.atleast_1d(np.asarray(coeff, dtype=np.complex128)).copy()
        kx = np.broadcast_to(np.asarray(kx, dtype=np.complex128), coeff.shape).copy()
        kt = np.broadcast_to(np.asarray(kt, dtype=np.complex128), coeff.shape).copy()
        if merge:
            coeff, kx, kt = _merge(coeff, kx, kt)
        for arr in (coeff, kx, kt):
            arr.flags.writeable = False
        return cls(coeff, kx, kt)

    @classmethod
    def constant(cls, value: complex) -> "ExpSum":
        return cls.from_terms([value], [0], [0])

    @classmethod
    def zero(cls) -> "ExpSum":
        return cls.from_terms([], [], [])

    def __len__(self):
        return self.coeff.size

    def terms(self):
        return list(zip(self.coeff.tolist(), self.kx.tolist(), self.kt.tolist()))

    def __repr__(self):
        return f"ExpSum({len(self)} terms)"

    # algebra

    def __add__(self, other):
        if not isinstance(other, ExpSum):
            other = ExpSum.constant(other)
        return ExpSum.from_terms(np.concatenate([self.coeff, other.coeff]),
                                 np.concatenate([self.kx, other.kx]),
                                 np.concatenate([self.kt, other.kt]))

    __radd__ = __add__

    def __neg__(self):
        return ExpSum.from_terms(-self.coeff, self.kx, self.kt, merge=False)

    def __sub__(self, other):
        return self + (-other if isinstance(other, ExpSum) else -complex(other))

    def scale(self, s: complex) -> "ExpSum":
        return ExpSum.from_terms(self.coeff * s, self.kx, self.kt)

    def __mul__(self, other):
        if not isinstance(other, ExpSum):
            return self.scale(complex(other))
        return hirota(0, 0, self, other)

    __rmul__ = __mul__

    def derivative(self, a: int = 0, b: int = 0) -> "ExpSum":
        """Exact partial ``d^a_x d^b_t``: each coefficient gains ``kx^a kt^b``."""
        return ExpSum.from_terms(self.coeff * self.kx ** a * self.kt ** b, self.kx, self.kt)

    def in_moving_frame(self, speed: float) -> "ExpSum":
        """Re-express in coordinates where the argument x is replaced by ``x - speed*t``."""
        return ExpSum.from_terms(self.coeff, self.kx, self.kt - speed * self.kx, merge=False)

    # evaluation

    def max_exponent(self, x, t) -> np.ndarray:
        x, t = _as_points(x, t)
        return _kernels.expsum_max_exponent(self.kx, self.kt, x, t)

    def evaluate_scaled(self, x, t, shift=None):
        """Return ``(values * exp(-shift), shift)``; shift defaults to the max exponent."""
        x, t = _as_points(x, t)
        if shift is None:
            shift = self.max_exponent(x, t)
        shift = np.broadcast_to(np.asarray(shift, dtype=np.float64), x.shape)
        vals = _kernels.expsum_jet(self.coeff, self.kx, self.kt, x, t, shift, 0, 0)[:, 0, 0]
        return vals, shift

    def magnitude_scaled(self, x, t, shift):
        """Sum of absolute term values times ``exp(-shift)`` (the scale of the sum)."""
        x, t = _as_points(x, t)
        shift = np.broadcast_to(np.asarray(shift, dtype=np.float64), x.shape)
        return ExpSum(np.abs(self.coeff).astype(np.complex128), self.kx.real.astype(np.complex128),
                      self.kt.real.astype(np.complex128)).evaluate_scaled(x, t, shift)[0].real

    def __call__(self, x, t):
        scalar = np.ndim(x) == 0 and np.ndim(t) == 0
        shape = np.broadcast_shapes(np.shape(x), np.shape(t))
        vals, shift = self.evaluate_scaled(x, t)
        if np.any(shift > SAFE_EXPONENT):
            raise NonFiniteResultError(
                f"exponent {shift.max():.1f} exceeds the safe range {SAFE_EXPONENT} even after centering")
        out = (vals * np.exp(shift)).reshape(shape)
        return complex(out) if scalar else out

    def jet_scaled(self, x, t, shift) -> Jet:
        """Jet of the sum times ``exp(-shift)`` at the given points."""
        x, t = _as_points(x, t)
        shift = np.broadcast_to(np.asarray(shift, dtype=np.float64), x.shape)
        d = _kernels.expsum_jet(self.coeff, self.kx, self.kt, x, t, shift, AMAX, BMAX)
        return Jet.from_derivatives(d)


def _as_points(x, t):
    x, t = np.broadcast_arrays(np.asarray(x, dtype=np.float64), np.asarray(t, dtype=np.float64))
    return np.ascontiguousarray(x.reshape(-1)), np.ascontiguousarray(t.reshape(-1))


def hirota(m: int, n: int, F: ExpSum, G: ExpSum) -> ExpSum:
    """Hirota bilinear derivative ``D_x^m D_t^n F . G`` as an exact ExpSum.

    Each term pair contributes ``c c' (kx - kx')^m (kt - kt')^n`` times the
    product exponential.
    """
    if len(F) == 0 or len(G) == 0:
        return ExpSum.zero()
    dkx = F.kx[:, None] - G.kx[None, :]
    dkt = F.kt[:, None] - G.kt[None, :]
    c = F.coeff[:, None] * G.coeff[None, :]
    if m:
        c = c * dkx ** m
    if n:
        c = c * dkt ** n
    return ExpSum.from_terms(c.ravel(), (F.kx[:, None] + G.kx[None, :]).ravel(),
                             (F.kt[:, None] + G.kt[None, :]).ravel())


def joint_shift(sums, x, t) -> np.ndarray:
    """Common per-point centering exponent for several sums (max over all terms)."""
    x, t = _as_points(x, t)
    shift = np.full(x.shape, -np.inf)
    for s in sums:
        if len(s):
            shift = np.maximum(shift, s.max_exponent(x, t))
    return np.where(np.isfinite(shift), shift, 0.0)
