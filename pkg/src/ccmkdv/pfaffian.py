"""Pfaffians of even-order skew-symmetric complex matrices.

Two independent evaluators are provided: the first-row expansion
(:func:`pfaffian_expand`), exact up to rounding and exponential in the order,
and skew-symmetric Gaussian elimination with pivoting (:func:`pfaffian_ltl`),
cubic in the order.  The expansion serves as the oracle for the elimination.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from . import _kernels
from .errors import ConfigError, NonFiniteResultError, OrderBoundError

EXPAND_MAX_ORDER = 12


@dataclass(frozen=True, eq=False)
class SkewMatrix:
    """Even-order skew-symmetric matrix stored as its strict upper triangle.

    ``upper`` holds the entries ``a(i, j)`` for ``i < j`` in row-major order.
    """

    order: int
    upper: np.ndarray

    def __post_init__(self):
        if self.order < 0 or self.order % 2:
            raise ConfigError(f"skew matrix order must be even and non-negative, got {self.order}")
        up = np.array(self.upper, dtype=np.complex128).reshape(-1)
        expected = self.order * (self.order - 1) // 2
        if up.size != expected:
            raise ConfigError(f"order {self.order} needs {expected} upper entries, got {up.size}")
        up.flags.writeable = False
        object.__setattr__(self, "upper", up)

    @classmethod
    def from_upper(cls, entries) -> "SkewMatrix":
        entries = np.asarray(entries, dtype=np.complex128).reshape(-1)
        # solve n(n-1)/2 = len for n
        n = int(round((1 + np.sqrt(1 + 8 * entries.size)) / 2)) if entries.size else 0
        return cls(n, entries)

    @classmethod
    def from_dense(cls, a, check: bool = False) -> "SkewMatrix":
        """Build from a dense array; only the strict upper triangle is read.

        With ``check`` the full array must be skew-symmetric to 1e-12.
        """
        a = np.asarray(a, dtype=np.complex128)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ConfigError(f"expected a square matrix, got shape {a.shape}")
        if check and not np.allclose(a, -a.T, rtol=0, atol=1e-12 * max(1.0, float(np.abs(a).max(initial=0)))):
            raise ConfigError("matrix is not skew-symmetric")
        iu = np.triu_indices(a.shape[0], k=1)
        return cls(a.shape[0], a[iu])

    def dense(self) -> np.ndarray:
        n = self.order
        a = np.zeros((n, n), dtype=np.complex128)
        iu = np.triu_indices(n, k=1)
        a[iu] = self.upper
        a[(iu[1], iu[0])] = -self.upper
        return a

    def __getitem__(self, ij) -> complex:
        i, j = ij
        if i == j:
            return 0j
        if i > j:
            return -self[j, i]
        n = self.order
        return complex(self.upper[i * n - i * (i + 1) // 2 + (j - i - 1)])


def perfect_matchings(n: int) -> Iterator[tuple[int, tuple[tuple[int, int], ...]]]:
    """Yield ``(sign, pairs)`` for every perfect matching of ``range(n)``.

    Matchings come in lexicographic order on the smallest unpaired index;
    ``sign`` is the parity of the permutation ``(i1 j1 i2 j2 ...)``.
    """
    if n % 2:
        return

    def rec(rest):
        if not rest:
            yield 1, ()
            return
        first = rest[0]
        for pos in range(1, len(rest)):
            sign = -1 if pos % 2 == 0 else 1
            remaining = rest[1:pos] + rest[pos + 1:]
            for s, sub in rec(remaining):
                yield sign * s, ((first, rest[pos]),) + sub

    yield from rec(tuple(range(n)))


def pfaffian_expand(m: SkewMatrix, max_order: int = EXPAND_MAX_ORDER) -> complex:
    """Pfaffian by recursive expansion along the first row.

    ``Pf(A) = sum_{j>1} (-1)^j a(1, j) Pf(A with rows/cols 1, j removed)``
    with the 1-based sign convention and ``Pf`` of the empty matrix equal to 1.
    """
    if m.order > max_order:
        raise OrderBoundError(
            f"pfaffian_expand supports order <= {max_order} (got {m.order}); "
            "raise max_order or use pfaffian_ltl"
        )
    a = m.dense()

    def rec(idx):
        if not idx:
            return 1.0 + 0j
        first = idx[0]
        total = 0j
        for pos in range(1, len(idx)):
            v = a[first, idx[pos]]
            if v == 0:
                continue
            sign = 1.0 if pos % 2 == 1 else -1.0
            total += sign * v * rec(idx[1:pos] + idx[pos + 1:])
        return total

    return complex(rec(tuple(range(m.order))))


def pfaffian_ltl(m: SkewMatrix | np.ndarray) -> complex:
    """Pfaffian by skew-symmetric tridiagonalization with partial pivoting.

    Pivots are the largest-magnitude entries of the active column, ties going
    to the lowest index.  Raises :class:`NonFiniteResultError` on overflow.
    """
    a = m.dense() if isinstance(m, SkewMatrix) else np.asarray(m, dtype=np.complex128)
    if a.shape[0] == 0:
        return 1.0 + 0j
    if not np.all(np.isfinite(a)):
        raise NonFiniteResultError("matrix has non-finite entries")
    with np.errstate(over="ignore", invalid="ignore"):
        pf = _kernels.pfaffian_ltl(a)
    if not np.isfinite(pf):
        raise NonFiniteResultError(f"Pfaffian of order {a.shape[0]} is not finite ({pf})")
    return pf


def pfaffian_batch(a: np.ndarray) -> np.ndarray:
    """Pfaffians of a stack of dense skew matrices, shape ``(m, n, n)``."""
    a = np.asarray(a, dtype=np.complex128)
    if a.shape[1] == 0:
        return np.ones(a.shape[0], dtype=np.complex128)
    if not np.all(np.isfinite(a)):
        raise NonFiniteResultError("matrix stack has non-finite entries")
    with np.errstate(over="ignore", invalid="ignore"):
        out = _kernels.pfaffian_ltl_batch(a)
    if not np.all(np.isfinite(out)):
        bad = int(np.argmin(np.isfinite(out)))
        raise NonFiniteResultError(f"Pfaffian not finite for matrix {bad} ({out[bad]})")
    return out
