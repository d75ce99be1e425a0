"""The algebraic reduction condition on spectral parameters, and solvers for it.

Each spectral parameter ``p`` of a dark soliton must satisfy

    sum_nu 2 alpha_nu^2 rho_nu^2 / |p^2 + alpha_nu^2|^2 = 1

(at unit nonlinearity coefficient).  This is one real equation in two real
unknowns, so admissible parameters form curves in the complex plane; the
solvers here fix ``Im p`` and find ``Re p``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, NoSignChangeError, SingularParameterError

RESIDUAL_TOL = 1e-12
MAX_ITER = 200
SCAN_CELLS = 400


@dataclass(frozen=True)
class ConstraintPoint:
    p: complex
    residual: float


@dataclass
class FamilyScan:
    """Result of sampling the admissible curve; failures do not raise."""

    points: list[ConstraintPoint] = field(default_factory=list)
    failures: list[tuple[float, str]] = field(default_factory=list)


def _terms(rho, alpha):
    return [(float(a), float(r)) for r, a in zip(rho, alpha) if r != 0]


def reduction_residual(p: complex, rho, alpha) -> float:
    """Left side of the reduction condition minus one; real by construction."""
    p = complex(p)
    total = 0.0
    for a, r in _terms(rho, alpha):
        q = p * p + a * a
        d = q.real * q.real + q.imag * q.imag
        if d == 0.0:
            raise SingularParameterError(f"pole of the reduction condition: p^2 = -alpha^2 with alpha = {a}")
        total += 2.0 * a * a * r * r / d
    return total - 1.0


def reduction_lhs_complex(p: complex, rho, alpha) -> complex:
    """Naive complex evaluation ``2a^2r^2 / ((p^2+a^2)(p*^2+a^2))`` summed (reality check)."""
    p = complex(p)
    pc = p.conjugate()
    return sum(2 * a * a * r * r / ((p * p + a * a) * (pc * pc + a * a)) for a, r in _terms(rho, alpha))


def _residual_and_slope(re_p, im_p, rho, alpha):
    p = complex(re_p, im_p)
    r = -1.0
    dr = 0.0
    for a, rr in _terms(rho, alpha):
        q = p * p + a * a
        d = q.real * q.real + q.imag * q.imag
        if d == 0.0:
            raise SingularParameterError(f"pole of the reduction condition at p = {p}")
        k = 2.0 * a * a * rr * rr
        r += k / d
        # d|q|^2 / dRe(p) = 4 Re(conj(q) p)
        dr -= k * 4.0 * (q.conjugate() * p).real / (d * d)
    return r, dr


def solve_re(im_p: float, rho, alpha, bracket=(0.1, 3.0)) -> float:
    """Solve the reduction condition for ``Re p`` at fixed ``Im p``.

    The bracket is scanned for the first sign change (the smallest root when
    several exist), which is then refined by Newton steps safeguarded with
    bisection until the residual is below 1e-12.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not (0 < lo < hi):
        raise ValueError(f"bracket endpoints must satisfy 0 < lo < hi, got {bracket}")
    grid = np.linspace(lo, hi, SCAN_CELLS + 1)
    vals = [_residual_and_slope(g, im_p, rho, alpha)[0] for g in grid]
    for k in range(SCAN_CELLS + 1):
        if vals[k] == 0.0:
            return float(grid[k])
        if k and np.sign(vals[k]) != np.sign(vals[k - 1]):
            a, b = grid[k - 1], grid[k]
            fa = vals[k - 1]
            break
    else:
        raise NoSignChangeError(
            f"no sign change of the reduction residual for Im p = {im_p} in [{lo}, {hi}] "
            f"(residuals {vals[0]:.3e} and {vals[-1]:.3e})",
            vals[0], vals[-1])

    x = 0.5 * (a + b)
    for _ in range(MAX_ITER):
        f, df = _residual_and_slope(x, im_p, rho, alpha)
        if abs(f) < RESIDUAL_TOL:
            return float(x)
        if np.sign(f) == np.sign(fa):
            a, fa = x, f
        else:
            b = x
        step = x - f / df if df != 0 else None
        x = step if step is not None and a < step < b else 0.5 * (a + b)
        if b - a < 4 * np.finfo(float).eps * max(1.0, abs(x)):
            f, _ = _residual_and_slope(x, im_p, rho, alpha)
            if abs(f) < RESIDUAL_TOL:
                return float(x)
            break
    raise ConvergenceError(f"reduction solve did not reach |residual| < {RESIDUAL_TOL} at Im p = {im_p}")


def solve_p(im_p: float, rho, alpha, bracket=(0.1, 3.0)) -> complex:
    """Convenience: the admissible ``p`` with the given imaginary part."""
    return complex(solve_re(im_p, rho, alpha, bracket), im_p)


def family_scan(rho, alpha, im_range, bracket=(0.1, 3.0)) -> FamilyScan:
    """Solve at ``n`` equally spaced ``Im p`` in ``[lo, hi]``; failures are recorded."""
    lo, hi, n = im_range
    n = int(n)
    if n < 2:
        raise ValueError("family_scan needs at least two samples")
    out = FamilyScan()
    for im in np.linspace(lo, hi, n):
        try:
            re = solve_re(im, rho, alpha, bracket)
        except (NoSignChangeError, ConvergenceError, SingularParameterError) as exc:
            out.failures.append((float(im), str(exc)))
            continue
        p = complex(re, im)
        out.points.append(ConstraintPoint(p, reduction_residual(p, rho, alpha)))
    return out
