"""Pfaffian tau functions of the dark-dark soliton family.

The tau function ``tau_{k1,k2}`` is the Pfaffian ``(1, 2, ..., 2N)`` with entries

    (i, j) = c_ij + (p_i - p_j)/(p_i + p_j) * phi_i phi_j * exp(xi_i + xi_j),
    phi_i  = prod_nu ((p_i + a_nu)/(p_i - a_nu))^k_nu,
    xi_i   = p_i x + p_i^3 t + xi_i0.

For dark solitons ``c_ij`` is the anti-diagonal delta, ``a_nu = -i alpha_nu``
and the second half of the index range is the conjugate of the first:
``p_{2N+1-i} = conj(p_i)`` and ``xi_{2N+1-i,0} = conj(xi_i0) + i*phase``.

All coordinates here are moving-frame coordinates; the lab-frame shift is
applied in :mod:`ccmkdv.assembly`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from math import pi, sqrt
from typing import NamedTuple

import numpy as np

from .errors import (CoincidentParameterError, ConfigError, DegenerateConfigWarning,
                     NonFiniteResultError, OrderBoundError, ReductionConditionError,
                     SingularParameterError)
from .expsum import SAFE_EXPONENT, ExpSum
from .jet import Jet
from .pfaffian import SkewMatrix, pfaffian_batch, pfaffian_ltl
from .reduction import reduction_residual
from .report import ResidualReport, pointwise_report

MAX_EXPSUM_N = 5
STRICT_REDUCTION_TOL = 1e-8
PAPER_ROUNDED_TOL = 2e-2
PHASE_DEFAULT = pi / 2
PHASE_REGULAR = -pi / 2


class TauIndex(NamedTuple):
    k1: int = 0
    k2: int = 0

    def shifted(self, d1: int = 0, d2: int = 0) -> "TauIndex":
        return TauIndex(self.k1 + d1, self.k2 + d2)

    def negated(self) -> "TauIndex":
        return TauIndex(-self.k1, -self.k2)


F_INDEX = TauIndex(0, 0)
G1_INDEX = TauIndex(1, 0)
G2_INDEX = TauIndex(0, 1)


@dataclass(frozen=True)
class BKPParams:
    """Generic Pfaffian parameters without the conjugacy reduction.

    ``p`` and ``xi0`` have length 2N, ``a`` holds the two discrete-flow
    parameters, and ``const`` is the antisymmetric constant part ``c_ij``
    given as a tuple of rows.
    """

    p: tuple
    xi0: tuple
    a: tuple
    const: tuple

    def __post_init__(self):
        n = len(self.p)
        if n % 2:
            raise ConfigError("BKP parameter count must be even")
        c = np.asarray(self.const, dtype=np.complex128)
        if c.size == 0:
            c = c.reshape(n, n) if n == 0 else c
        if c.shape != (n, n) or not np.allclose(c, -c.T):
            raise ConfigError("const must be an antisymmetric 2N x 2N matrix")

    @property
    def order(self) -> int:
        return len(self.p)


@dataclass(frozen=True)
class SolitonConfig:
    """Full parameter set of an N dark-dark soliton.

    ``rho`` are the physical background amplitudes at nonlinearity ``c``;
    internally the solution is built at unit nonlinearity with amplitudes
    ``sqrt(c) * rho`` (see :attr:`rho_hat`).  ``conj_phase`` is the constant
    added to the conjugate-half phases; the default ``pi/2`` follows the
    published construction, ``-pi/2`` selects the regular branch for
    parameters with ``Im p / Re p > 0``.
    """

    rho: tuple[float, float]
    alpha: tuple[float, float]
    p: tuple[complex, ...] = ()
    xi0: tuple[complex, ...] | None = None
    c: float = 1.0
    conj_phase: float = PHASE_DEFAULT
    paper_rounded: bool = False
    check_reduction: bool = True
    reduction_residuals: tuple[float, ...] = field(init=False, default=())

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "rho", tuple(float(r) for r in self.rho))
        set_(self, "alpha", tuple(float(a) for a in self.alpha))
        set_(self, "p", tuple(complex(q) for q in self.p))
        xi0 = (0j,) * len(self.p) if self.xi0 is None else tuple(complex(z) for z in self.xi0)
        set_(self, "xi0", xi0)
        set_(self, "c", float(self.c))
        set_(self, "conj_phase", float(self.conj_phase))
        if len(self.rho) != 2 or len(self.alpha) != 2:
            raise ConfigError("rho and alpha need exactly two components")
        if any(r < 0 for r in self.rho):
            raise ConfigError(f"amplitudes must be non-negative, got {self.rho}")
        if self.c <= 0:
            raise ConfigError(f"nonlinearity coefficient c must be positive, got {self.c}")
        if len(xi0) != len(self.p):
            raise ConfigError(f"{len(self.p)} spectral parameters but {len(xi0)} phase constants")
        if self.rho[0] > 0 and self.rho[1] > 0 and self.alpha[0] == self.alpha[1]:
            warnings.warn("alpha1 == alpha2 with both amplitudes positive: the two reduction terms merge",
                          DegenerateConfigWarning, stacklevel=3)
        for q in self.p:
            if q.real == 0:
                raise ConfigError(f"spectral parameters need Re(p) != 0, got {q}")
        full = self.full_p()
        n2 = len(full)
        for i in range(n2):
            for j in range(i + 1, n2):
                if abs(full[i] + full[j]) < 1e-12:
                    raise SingularParameterError(f"p_{i + 1} + p_{j + 1} = 0")
                if j != n2 - 1 - i and abs(full[i] - full[j]) < 1e-12:
                    raise CoincidentParameterError(
                        f"spectral parameters {i + 1} and {j + 1} coincide ({full[i]})")
        res = tuple(reduction_residual(q, self.rho_hat, self.alpha) for q in self.p)
        set_(self, "reduction_residuals", res)
        if self.check_reduction:
            tol = PAPER_ROUNDED_TOL if self.paper_rounded else STRICT_REDUCTION_TOL
            for i, r in enumerate(res):
                if abs(r) > tol:
                    raise ReductionConditionError(
                        f"p_{i + 1} = {self.p[i]} misses the reduction condition: residual {r:.3e} > {tol:g}"
                        + ("" if self.paper_rounded else " (use paper_rounded for 2-decimal parameters)"))

    @property
    def N(self) -> int:
        return len(self.p)

    @property
    def rho_hat(self) -> tuple[float, float]:
        """Amplitudes at unit nonlinearity, ``sqrt(c) * rho``."""
        s = sqrt(self.c)
        return (s * self.rho[0], s * self.rho[1])

    @property
    def frame_speed(self) -> float:
        """Speed of the moving frame, ``3 c (rho1^2 + rho2^2)``."""
        return 3.0 * self.c * (self.rho[0] ** 2 + self.rho[1] ** 2)

    def omega(self, nu: int) -> float:
        a = self.alpha[nu]
        return a ** 3 + a * self.frame_speed

    def full_p(self) -> tuple[complex, ...]:
        return self.p + tuple(q.conjugate() for q in reversed(self.p))

    def full_xi0(self) -> tuple[complex, ...]:
        shift = 1j * self.conj_phase
        return self.xi0 + tuple(z.conjugate() + shift for z in reversed(self.xi0))

    def bkp(self) -> BKPParams:
        n2 = 2 * self.N
        const = tuple(tuple(1.0 if j == n2 - 1 - i and i < j else (-1.0 if j == n2 - 1 - i and i > j else 0.0)
                            for j in range(n2)) for i in range(n2))
        return BKPParams(self.full_p(), self.full_xi0(), (-1j * self.alpha[0], -1j * self.alpha[1]), const)

    def replace(self, **changes) -> "SolitonConfig":
        from dataclasses import asdict
        kw = {k: v for k, v in asdict(self).items() if k != "reduction_residuals"}
        kw.update(changes)
        return SolitonConfig(**kw)


def _params(obj) -> BKPParams:
    return obj.bkp() if isinstance(obj, SolitonConfig) else obj


def _phi(params: BKPParams, index: TauIndex) -> list[complex]:
    out = []
    for i, q in enumerate(params.p):
        v = 1.0 + 0j
        for a, k in zip(params.a, index):
            if k == 0:
                continue
            num, den = q + a, q - a
            if (den == 0 and k > 0) or (num == 0 and k < 0):
                raise SingularParameterError(f"p_{i + 1} = {q} hits the pole of the flow factor for a = {a}")
            v *= (num / den) ** k
        out.append(v)
    return out


def entry(config, index, i: int, j: int):
    """Entry ``(i, j)`` (1-based, ``i < j``) as ``(constant, one-term ExpSum)``."""
    params = _params(config)
    index = TauIndex(*index)
    n2 = params.order
    if not (1 <= i < j <= n2):
        raise ValueError(f"need 1 <= i < j <= {n2}, got ({i}, {j})")
    p = params.p
    pi_, pj = p[i - 1], p[j - 1]
    if pi_ + pj == 0:
        raise SingularParameterError(f"p_{i} + p_{j} = 0")
    phi = _phi(params, index)
    coeff = (pi_ - pj) / (pi_ + pj) * phi[i - 1] * phi[j - 1] * np.exp(params.xi0[i - 1] + params.xi0[j - 1])
    const = complex(params.const[i - 1][j - 1])
    return const, ExpSum.from_terms([coeff], [pi_ + pj], [pi_ ** 3 + pj ** 3], merge=False)


def _entry_arrays(params: BKPParams, index: TauIndex):
    p = np.asarray(params.p, dtype=np.complex128)
    s = p[:, None] + p[None, :]
    iu = np.triu_indices(p.size, k=1)
    if np.any(s[iu] == 0):
        raise SingularParameterError("p_i + p_j = 0 for some pair")
    phi = np.asarray(_phi(params, index))
    w = phi * np.exp(np.asarray(params.xi0, dtype=np.complex128))
    with np.errstate(divide="ignore", invalid="ignore"):
        coef = (p[:, None] - p[None, :]) / s * w[:, None] * w[None, :]
    np.fill_diagonal(coef, 0)
    return np.asarray(params.const, dtype=np.complex128).reshape(p.size, p.size), coef


def _schur_pfaffian(p, idx) -> complex:
    """``Pf[(p_i - p_j)/(p_i + p_j)]`` over ``idx`` as the closed-form product."""
    out = 1.0 + 0j
    for a in range(len(idx)):
        for b in range(a + 1, len(idx)):
            pi_, pj = p[idx[a]], p[idx[b]]
            out *= (pi_ - pj) / (pi_ + pj)
    return out


def _const_pfaffian(const, idx) -> complex:
    if not idx:
        return 1.0 + 0j
    sub = const[np.ix_(idx, idx)]
    if not sub.any():
        return 0j
    return complex(pfaffian_ltl(sub))


@lru_cache(maxsize=512)
def _tau_expsum_cached(params: BKPParams, index: TauIndex, max_n: int) -> ExpSum:
    n2 = params.order
    if n2 // 2 > max_n:
        raise OrderBoundError(f"exponential-sum expansion is limited to N <= {max_n} (got N = {n2 // 2})")
    const, _ = _entry_arrays(params, index)
    p = np.asarray(params.p, dtype=np.complex128)
    w = np.asarray(_phi(params, index)) * np.exp(np.asarray(params.xi0, dtype=np.complex128))
    # Pf(C + E) = sum over even subsets S of eps(S) Pf(C on the complement) Pf(E on S);
    # E has Schur form so Pf(E on S) is a product with no cancellation
    coeff, masks = [], []
    for mask in range(1 << n2):
        S = [i for i in range(n2) if mask >> i & 1]
        if len(S) % 2:
            continue
        rest = [i for i in range(n2) if not mask >> i & 1]
        pc = _const_pfaffian(const, rest)
        if pc == 0:
            continue
        # sign of the shuffle putting S first
        inv = sum(1 for a in S for b in rest if b < a)
        sign = -1.0 if inv % 2 else 1.0
        coeff.append(sign * pc * _schur_pfaffian(p, S) * np.prod(w[S]))
        masks.append(mask)
    sel = np.array([[(m >> i) & 1 for i in range(n2)] for m in masks], dtype=np.float64).reshape(len(masks), n2)
    return ExpSum.from_terms(coeff, sel @ p, sel @ p ** 3)


def tau_expsum(config, index=F_INDEX, max_n: int = MAX_EXPSUM_N) -> ExpSum:
    """Exact expansion of ``tau_{k1,k2}`` as a sum of exponentials."""
    return _tau_expsum_cached(_params(config), TauIndex(*index), max_n)


def skew_matrices(config, index, x, t) -> np.ndarray:
    """Dense entry matrices at each point, shape ``(npts, 2N, 2N)``."""
    params = _params(config)
    const, coef = _entry_arrays(params, TauIndex(*index))
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    t = np.asarray(t, dtype=np.float64).reshape(-1)
    p = np.asarray(params.p, dtype=np.complex128)
    with np.errstate(over="ignore", invalid="ignore"):
        e = np.exp(np.multiply.outer(x, p) + np.multiply.outer(t, p ** 3))
        a = const[None] + coef[None] * e[:, :, None] * e[:, None, :]
    iu = np.tril_indices(p.size, k=0)
    a[:, iu[0], iu[1]] = 0
    return a - np.transpose(a, (0, 2, 1))


def skew_matrix(config, index, x: float, t: float) -> SkewMatrix:
    return SkewMatrix.from_dense(skew_matrices(config, index, [x], [t])[0])


def tau_eval(config, index=F_INDEX, x=0.0, t=0.0, backend: str = "expsum"):
    """Value of ``tau_{k1,k2}`` at moving-frame points ``(x, t)``."""
    scalar = np.ndim(x) == 0 and np.ndim(t) == 0
    xb, tb = np.broadcast_arrays(np.asarray(x, dtype=np.float64), np.asarray(t, dtype=np.float64))
    if backend == "expsum":
        out = tau_expsum(config, index)(xb, tb)
    elif backend == "pfaffian":
        params = _params(config)
        if params.order == 0:
            out = np.ones(xb.shape, dtype=np.complex128)
        else:
            p = np.asarray(params.p)
            peak = np.max(np.abs(np.multiply.outer(xb.reshape(-1), p.real) + np.multiply.outer(tb.reshape(-1), (p ** 3).real)))
            if 2 * peak > SAFE_EXPONENT:
                raise NonFiniteResultError(f"entry exponent {2 * peak:.1f} exceeds the safe range")
            out = pfaffian_batch(skew_matrices(params, index, xb, tb)).reshape(xb.shape)
    else:
        raise ValueError(f"unknown backend {backend!r}; use 'expsum' or 'pfaffian'")
    return complex(np.asarray(out).reshape(-1)[0]) if scalar else out


def tau_jet(config, index, x, t) -> Jet:
    """Jet of ``tau_{k1,k2}``: value and partials up to ``d^3_x d_t``."""
    es = tau_expsum(config, index)
    shift = es.max_exponent(x, t)
    if np.any(shift > SAFE_EXPONENT):
        raise NonFiniteResultError(f"exponent {shift.max():.1f} exceeds the safe range")
    j = es.jet_scaled(x, t, shift)
    return Jet(j.c * np.exp(shift)[:, None, None])


def verify_conjugacy(config, index, points, backend: str = "expsum") -> ResidualReport:
    """Check ``conj(tau_{k1,k2}) == tau_{-k1,-k2}`` at the given points."""
    index = TauIndex(*index)
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if pts.size == 0:
        raise ValueError("verify_conjugacy needs at least one point")
    x, t = pts[:, 0], pts[:, 1]
    a = np.asarray(tau_eval(config, index, x, t, backend))
    b = np.asarray(tau_eval(config, index.negated(), x, t, backend))
    res = np.abs(np.conj(a) - b)
    scale = np.maximum(1.0, np.abs(a))
    return pointwise_report(f"conjugacy{tuple(index)}", x, t, res, scale)
