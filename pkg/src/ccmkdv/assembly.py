"""Physical fields u1, u2 from tau functions, closed forms and asymptotics.

Public functions take lab-frame coordinates ``(x, t)``; the shift to the
moving frame ``x - 3c(rho1^2 + rho2^2) t`` happens here and nowhere else.
"""

from __future__ import annotations

import cmath
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import BranchWarning, CoincidentParameterError, ConfigError, NearSingularError
from .expsum import ExpSum, joint_shift
from .jet import Jet
from .tau import F_INDEX, G1_INDEX, G2_INDEX, SolitonConfig, tau_eval, tau_expsum

SINGULAR_RTOL = 1e-6


@dataclass(frozen=True)
class FieldSample:
    """Field values at lab-frame points (arrays broadcast to a common shape).

    ``f_rel`` is ``|f|`` divided by the sum of the magnitudes of its terms, a
    scale-free measure of how close the point is to a zero of ``f``.
    """

    x: np.ndarray
    t: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    f_abs: np.ndarray | None = None
    f_rel: np.ndarray | None = None


@dataclass(frozen=True)
class InteractionConstants:
    C1: complex
    C2: complex
    A1: complex
    A2: complex
    B1: complex
    B2: complex
    M: float


@dataclass(frozen=True)
class PhaseShifts:
    chi1: complex
    chi2: complex
    gamma1: complex
    gamma2: complex


def _points(x, t):
    x, t = np.broadcast_arrays(np.asarray(x, dtype=np.float64), np.asarray(t, dtype=np.float64))
    return x, t


def moving_frame(config: SolitonConfig, x, t):
    return np.asarray(x) - config.frame_speed * np.asarray(t)


def theta(config: SolitonConfig, nu: int, x, t):
    """Carrier phase ``alpha_nu x - omega_nu t`` of component ``nu`` (0 or 1)."""
    return config.alpha[nu] * np.asarray(x) - config.omega(nu) * np.asarray(t)


def _check_singular(f_rel, x, t):
    bad = f_rel < SINGULAR_RTOL
    if np.any(bad):
        w = np.flatnonzero(bad.reshape(-1))[0]
        xw, tw = float(x.reshape(-1)[w]), float(t.reshape(-1)[w])
        raise NearSingularError(
            f"f is numerically zero at x = {xw:.6g}, t = {tw:.6g} (|f|/scale = {f_rel.reshape(-1)[w]:.2e}); "
            "this configuration has a real zero of f", xw, tw)


def fields(config: SolitonConfig, x, t, *, backend: str = "expsum", check_singular: bool = True) -> FieldSample:
    """Evaluate ``u_nu = rho_nu (g_nu / f) exp(i theta_nu)`` at lab-frame points."""
    x, t = _points(x, t)
    xt = moving_frame(config, x, t)
    if backend == "expsum":
        sums = [tau_expsum(config, idx) for idx in (F_INDEX, G1_INDEX, G2_INDEX)]
        shift = joint_shift(sums, xt, t)
        f, g1, g2 = (s.evaluate_scaled(xt, t, shift)[0] for s in sums)
        scale = sums[0].magnitude_scaled(xt, t, shift)
        with np.errstate(over="ignore"):
            f_abs = np.abs(f) * np.exp(shift)
    elif backend == "pfaffian":
        f, g1, g2 = (np.asarray(tau_eval(config, idx, xt, t, "pfaffian")).reshape(-1)
                     for idx in (F_INDEX, G1_INDEX, G2_INDEX))
        sums = tau_expsum(config, F_INDEX)
        scale = sums.magnitude_scaled(xt, t, 0.0)
        f_abs = np.abs(f)
    else:
        raise ValueError(f"unknown backend {backend!r}")
    with np.errstate(divide="ignore", invalid="ignore"):
        f_rel = (np.abs(f) / scale).reshape(x.shape)
    if check_singular:
        _check_singular(f_rel, x, t)
    shape = x.shape
    with np.errstate(divide="ignore", invalid="ignore"):
        u1 = config.rho[0] * (g1 / f).reshape(shape) * np.exp(1j * theta(config, 0, x, t))
        u2 = config.rho[1] * (g2 / f).reshape(shape) * np.exp(1j * theta(config, 1, x, t))
    return FieldSample(x, t, u1, u2, np.asarray(f_abs).reshape(shape), f_rel)


def field_jets(config: SolitonConfig, x, t):
    """Jets of ``u1``, ``u2`` in lab coordinates, plus ``f_rel`` per point.

    Derivatives are exact: tau functions differentiate term by term, the
    quotient and the carrier phase go through jet arithmetic.
    """
    x, t = _points(x, t)
    x = x.reshape(-1)
    t = t.reshape(-1)
    s = config.frame_speed
    sums = [tau_expsum(config, idx).in_moving_frame(s) for idx in (F_INDEX, G1_INDEX, G2_INDEX)]
    shift = joint_shift(sums, x, t)
    F, G1, G2 = (es.jet_scaled(x, t, shift) for es in sums)
    f_rel = np.abs(F.value) / sums[0].magnitude_scaled(x, t, shift)
    inv_f = F.reciprocal()
    out = []
    for nu, G in ((0, G1), (1, G2)):
        phase = Jet.exp_linear(1j * config.alpha[nu], -1j * config.omega(nu), x, t)
        out.append(G * inv_f * phase * config.rho[nu])
    return out[0], out[1], f_rel


def _flow_factor(p: complex, alpha: float) -> complex:
    pc = p.conjugate()
    return ((p - 1j * alpha) * (pc - 1j * alpha)) / ((p + 1j * alpha) * (pc + 1j * alpha))


def soliton_coefficient(config: SolitonConfig, j: int) -> complex:
    """``C_j``: coefficient of ``exp(xi_j + conj xi_j)`` in f (``j`` is 1-based)."""
    p = config.p[j - 1]
    pc = p.conjugate()
    return complex(np.exp(1j * config.conj_phase) * (p - pc) / (p + pc))


def _log_phase(c: complex) -> complex:
    c = complex(c)
    if not (c.real > 0 and abs(c.imag) <= 1e-12 * abs(c)):
        warnings.warn(f"log of {c:.6g} taken on the principal branch; f has a real zero",
                      BranchWarning, stacklevel=3)
        return cmath.log(c)
    return complex(np.log(c.real))


def _tanh_profile(flow: complex, arg):
    return 0.5 * (1 + flow) - 0.5 * (1 - flow) * np.tanh(arg)


def re_xi(config: SolitonConfig, j: int, x, t):
    """``Re xi_j`` at lab-frame points."""
    p = config.p[j - 1]
    return (p.real * moving_frame(config, x, t) + (p ** 3).real * np.asarray(t)
            + config.xi0[j - 1].real)


def one_soliton_closed(config: SolitonConfig, x, t) -> FieldSample:
    """Single dark soliton in tanh form.

    ``u_nu = rho_nu e^{i theta_nu} [ (1 + A)/2 - (1 - A)/2 tanh(Re xi_1 + log(C_1)/2) ]``
    with ``A`` the flow factor of component ``nu``.
    """
    if config.N != 1:
        raise ConfigError(f"one_soliton_closed needs N = 1, got N = {config.N}")
    x, t = _points(x, t)
    p = config.p[0]
    arg = re_xi(config, 1, x, t) + 0.5 * _log_phase(soliton_coefficient(config, 1))
    u = [config.rho[nu] * np.exp(1j * theta(config, nu, x, t)) * _tanh_profile(_flow_factor(p, config.alpha[nu]), arg)
         for nu in (0, 1)]
    return FieldSample(x, t, u[0], u[1])


def interaction_constants(config: SolitonConfig) -> InteractionConstants:
    if config.N != 2:
        raise ConfigError(f"interaction constants need N = 2, got N = {config.N}")
    p1, p2 = config.p
    c1, c2 = p1.conjugate(), p2.conjugate()
    den = (p1 + p2) * (c1 + c2) * (p1 + c2) * (c1 + p2)
    if abs(den) < 1e-14:
        raise CoincidentParameterError(f"M has a vanishing denominator for p1 = {p1}, p2 = {p2}")
    M = ((p1 - p2) * (c1 - c2) * (p1 - c2) * (c1 - p2)) / den
    a1, a2 = config.alpha
    return InteractionConstants(
        soliton_coefficient(config, 1), soliton_coefficient(config, 2),
        _flow_factor(p1, a1), _flow_factor(p2, a1),
        _flow_factor(p1, a2), _flow_factor(p2, a2),
        float(M.real))


def phase_shifts(config: SolitonConfig) -> PhaseShifts:
    k = interaction_constants(config)
    return PhaseShifts(k.C1, k.C1 * k.M, k.C2 * k.M, k.C2)


def two_soliton_expsums(config: SolitonConfig):
    """f, g1, g2 of the two-soliton solution in four-term form (moving frame)."""
    k = interaction_constants(config)
    p1, p2 = config.p
    kx = [0, 2 * p1.real, 2 * p2.real, 2 * (p1.real + p2.real)]
    kt = [0, 2 * (p1 ** 3).real, 2 * (p2 ** 3).real, 2 * ((p1 ** 3).real + (p2 ** 3).real)]
    e1 = np.exp(2 * config.xi0[0].real)
    e2 = np.exp(2 * config.xi0[1].real)
    out = []
    for w1, w2 in ((1.0, 1.0), (k.A1, k.A2), (k.B1, k.B2)):
        coeff = [1.0, k.C1 * w1 * e1, k.C2 * w2 * e2, k.C1 * k.C2 * w1 * w2 * k.M * e1 * e2]
        out.append(ExpSum.from_terms(coeff, kx, kt, merge=False))
    return out


def two_soliton_closed(config: SolitonConfig, x, t, *, check_singular: bool = True) -> FieldSample:
    if config.N != 2:
        raise ConfigError(f"two_soliton_closed needs N = 2, got N = {config.N}")
    x, t = _points(x, t)
    xt = moving_frame(config, x, t)
    sums = two_soliton_expsums(config)
    shift = joint_shift(sums, xt, t)
    f, g1, g2 = (s.evaluate_scaled(xt, t, shift)[0].reshape(x.shape) for s in sums)
    f_rel = np.abs(f) / sums[0].magnitude_scaled(xt, t, shift).reshape(x.shape)
    if check_singular:
        _check_singular(f_rel, x, t)
    u1 = config.rho[0] * g1 / f * np.exp(1j * theta(config, 0, x, t))
    u2 = config.rho[1] * g2 / f * np.exp(1j * theta(config, 1, x, t))
    return FieldSample(x, t, u1, u2, f_rel=f_rel)


def soliton_velocity(config: SolitonConfig, j: int, frame: str = "lab") -> float:
    """Velocity of soliton ``j``: ``-Re(p^3)/Re(p)`` in the moving frame."""
    p = config.p[j - 1]
    v = -(p ** 3).real / p.real
    return v + config.frame_speed if frame == "lab" else v


def _dressed(config: SolitonConfig, j: int, epoch: str) -> bool:
    """Whether the other soliton's exponent tends to +inf along soliton j."""
    k = 3 - j
    dv = soliton_velocity(config, j, "moving") - soliton_velocity(config, k, "moving")
    if dv == 0:
        raise ConfigError("solitons with equal velocities never collide")
    sign_t = -1.0 if epoch == "before" else 1.0
    return np.sign(config.p[k - 1].real * dv * sign_t) > 0


def asymptotic_phase(config: SolitonConfig, j: int, epoch: str) -> complex:
    """Phase term of soliton ``j`` far from the collision (chi or gamma)."""
    ps = phase_shifts(config)
    dressed = _dressed(config, j, epoch)
    if j == 1:
        return ps.chi2 if dressed else ps.chi1
    return ps.gamma1 if dressed else ps.gamma2


def dip_center(config: SolitonConfig, j: int, epoch: str, t) -> np.ndarray:
    """Lab-frame x where ``Re xi_j + log|phase|/2 = 0`` for the given epoch."""
    p = config.p[j - 1]
    lp = 0.5 * np.log(abs(asymptotic_phase(config, j, epoch)))
    t = np.asarray(t, dtype=np.float64)
    return config.frame_speed * t - ((p ** 3).real * t + config.xi0[j - 1].real + lp) / p.real


def asymptotic_field(config: SolitonConfig, soliton: int, epoch: str, x, t) -> FieldSample:
    """Asymptotic single-soliton form of soliton ``soliton`` before or after the collision.

    When the other soliton lies on the side where its exponential dominates,
    the background picks up its flow factor (A or B) and the phase term gains
    the interaction factor M; otherwise the bare one-soliton form applies.
    """
    if config.N != 2:
        raise ConfigError(f"asymptotic forms need N = 2, got N = {config.N}")
    if soliton not in (1, 2) or epoch not in ("before", "after"):
        raise ValueError("soliton must be 1 or 2 and epoch 'before' or 'after'")
    x, t = _points(x, t)
    k = interaction_constants(config)
    j = soliton
    flows = ((k.A1, k.A2), (k.B1, k.B2))
    dressed = _dressed(config, j, epoch)
    arg = re_xi(config, j, x, t) + 0.5 * _log_phase(asymptotic_phase(config, j, epoch))
    u = []
    for nu in (0, 1):
        own, other = flows[nu][j - 1], flows[nu][2 - j]
        pref = other if dressed else 1.0
        u.append(config.rho[nu] * pref * np.exp(1j * theta(config, nu, x, t)) * _tanh_profile(own, arg))
    return FieldSample(x, t, u[0], u[1])


def separation_time(config: SolitonConfig, tol: float = 1e-10, window: float | None = None) -> float:
    """Time after which each soliton is isolated to ``tol`` within ``window`` of its center.

    ``window`` defaults to five widths ``5 / min Re p``.  The other soliton's
    exponential at the window edge is then below ``tol``.
    """
    if config.N != 2:
        raise ConfigError("separation_time needs N = 2")
    kmin = min(abs(q.real) for q in config.p)
    if window is None:
        window = 5.0 / kmin
    dv = abs(soliton_velocity(config, 1, "moving") - soliton_velocity(config, 2, "moving"))
    shifts = abs(0.5 * np.log(abs(interaction_constants(config).M))) / kmin
    offsets = max(abs(0.5 * np.log(abs(soliton_coefficient(config, j)))) + abs(config.xi0[j - 1].real)
                  for j in (1, 2)) / kmin
    sep = window + np.log(1.0 / tol) / (2.0 * kmin) + shifts + 2 * offsets
    return float(sep / dv)


@dataclass(frozen=True)
class CollisionReport:
    """Before/after comparison of a two-soliton collision at ``t = -T`` and ``t = +T``.

    ``asym_error[(j, epoch)]`` is the sup-norm difference between the full
    field and the single-soliton asymptotic form within ``window`` of dip j.
    ``shift_measured[j]`` is the change of the tracked dip-trajectory
    intercept, ``shift_predicted[j]`` its value from the interaction constant.
    ``depth[(j, epoch)]`` holds the minimum of ``(|u1|, |u2|)`` at the dip.
    """

    T: float
    window: float
    asym_error: dict
    shift_measured: dict
    shift_predicted: dict
    depth: dict

    @property
    def max_asym_error(self) -> float:
        return max(self.asym_error.values())

    @property
    def max_shift_error(self) -> float:
        return max(abs(abs(self.shift_measured[j]) - abs(self.shift_predicted[j])) for j in (1, 2))

    @property
    def max_depth_change(self) -> float:
        return max(abs(self.depth[(j, "before")][nu] - self.depth[(j, "after")][nu]) for j in (1, 2) for nu in (0, 1))


def _intensity(config, x, t):
    fs = fields(config, np.atleast_1d(x), np.atleast_1d(t), check_singular=False)
    return np.abs(fs.u1[0]) ** 2 + np.abs(fs.u2[0]) ** 2


def track_dip(config: SolitonConfig, j: int, epoch: str, t: float, halfwidth: float | None = None) -> float:
    """Lab-frame position of dip ``j`` of the full field at time ``t`` (bounded minimization)."""
    from scipy.optimize import minimize_scalar

    x0 = float(dip_center(config, j, epoch, t))
    h = 2.0 / abs(config.p[j - 1].real) if halfwidth is None else halfwidth
    res = minimize_scalar(lambda x: _intensity(config, x, t), bounds=(x0 - h, x0 + h), method="bounded",
                          options={"xatol": 1e-12})
    return float(res.x)


def collision_report(config: SolitonConfig, T: float | None = None, window: float | None = None,
                     npts: int = 801, track_times: int = 5) -> CollisionReport:
    """Compare the full field with its asymptotic pieces and measure phase shifts.

    ``T`` defaults to :func:`separation_time`.  Dip trajectories are tracked
    at ``track_times`` instants in ``[T, T + 1]`` (and mirrored), fitted by a
    straight line, and the intercept change is reported per soliton.
    """
    if config.N != 2:
        raise ConfigError(f"collision analysis needs N = 2, got N = {config.N}")
    T = separation_time(config) if T is None else float(T)
    kmin = min(abs(q.real) for q in config.p)
    window = 5.0 / kmin if window is None else window
    k = interaction_constants(config)
    asym, depth, shift_m, shift_p = {}, {}, {}, {}
    for j in (1, 2):
        intercepts = {}
        for epoch, sgn in (("before", -1.0), ("after", 1.0)):
            t = sgn * T
            xc = float(dip_center(config, j, epoch, t))
            xs = np.linspace(xc - window, xc + window, npts)
            full = fields(config, xs, np.full_like(xs, t))
            approx = asymptotic_field(config, j, epoch, xs, np.full_like(xs, t))
            asym[(j, epoch)] = float(max(np.abs(full.u1 - approx.u1).max(), np.abs(full.u2 - approx.u2).max()))
            xd = track_dip(config, j, epoch, t)
            fs = fields(config, np.array([xd]), np.array([t]))
            depth[(j, epoch)] = (float(np.abs(fs.u1[0])), float(np.abs(fs.u2[0])))
            times = sgn * np.linspace(T, T + 1.0, track_times)
            pos = np.array([track_dip(config, j, epoch, tt) for tt in times])
            intercepts[epoch] = float(np.polyfit(times, pos, 1)[1])
        shift_m[j] = intercepts["after"] - intercepts["before"]
        shift_p[j] = float(0.5 * np.log(abs(k.M)) / config.p[j - 1].real)
    return CollisionReport(T, window, asym, shift_m, shift_p, depth)
