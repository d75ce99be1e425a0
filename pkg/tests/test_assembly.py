import warnings

import numpy as np
import pytest

from conftest import exact_config
from ccmkdv.assembly import (asymptotic_field, collision_report, field_jets, fields, interaction_constants,
                             one_soliton_closed, phase_shifts, separation_time, soliton_coefficient,
                             soliton_velocity, two_soliton_closed)
from ccmkdv.errors import BranchWarning, ConfigError, NearSingularError
from ccmkdv.tau import PHASE_DEFAULT, PHASE_REGULAR, SolitonConfig


def grid(xr=10, tr=5, nx=200, nt=50):
    X, T = np.meshgrid(np.linspace(-xr, xr, nx), np.linspace(-tr, tr, nt))
    return X, T


def test_background_for_zero_solitons():
    cfg = SolitonConfig((1.5, 0.5), (2, 1))
    X, T = grid(nx=20, nt=5)
    fs = fields(cfg, X, T)
    np.testing.assert_allclose(np.abs(fs.u1), 1.5)
    np.testing.assert_allclose(np.abs(fs.u2), 0.5)


def test_far_field_is_background(exact):
    cfg = exact[2]
    fs = fields(cfg, np.array([-200.0, 200.0]), np.array([0.0, 0.0]))
    np.testing.assert_allclose(np.abs(fs.u1), cfg.rho[0], rtol=1e-12)
    np.testing.assert_allclose(np.abs(fs.u2), cfg.rho[1], rtol=1e-12)


def test_one_soliton_closed_form(rounded1):
    X, T = grid()
    a, b = fields(rounded1, X, T), one_soliton_closed(rounded1, X, T)
    assert np.max(np.abs(a.u1 - b.u1)) / rounded1.rho[0] < 1e-9
    assert np.max(np.abs(a.u2 - b.u2)) / rounded1.rho[1] < 1e-9


def test_one_soliton_closed_form_default_phase(exact):
    X, T = grid()
    a, b = fields(exact[1], X, T), one_soliton_closed(exact[1], X, T)
    assert np.max(np.abs(a.u1 - b.u1)) < 1e-9


def test_two_soliton_closed_form(rounded2):
    X, T = grid(15, 1)
    a, b = fields(rounded2, X, T), two_soliton_closed(rounded2, X, T)
    assert np.max(np.abs(a.u1 - b.u1)) / rounded2.rho[0] < 1e-9
    assert np.max(np.abs(a.u2 - b.u2)) / rounded2.rho[1] < 1e-9


def test_pfaffian_backend_fields(rounded2):
    X, T = grid(6, 0.3, 40, 10)
    a, b = fields(rounded2, X, T), fields(rounded2, X, T, backend="pfaffian")
    np.testing.assert_allclose(a.u1, b.u1, rtol=1e-9, atol=1e-12)


def test_singular_branch_detected():
    cfg = SolitonConfig((1, 1), (2, 1), (0.88 + 1j,), paper_rounded=True, conj_phase=PHASE_DEFAULT)
    assert soliton_coefficient(cfg, 1).real < 0
    # f = 1 + C exp(2 Re xi) vanishes where 2 Re p x = -log|C| at t = 0
    x0 = -np.log(abs(soliton_coefficient(cfg, 1))) / (2 * cfg.p[0].real)
    with pytest.raises(NearSingularError) as info:
        fields(cfg, np.array([x0 - 1, x0]), np.zeros(2))
    assert info.value.x == pytest.approx(x0)
    fs = fields(cfg, np.array([x0]), np.zeros(1), check_singular=False)
    assert fs.f_rel[0] < 1e-6
    with pytest.warns(BranchWarning):
        one_soliton_closed(cfg, 0.0, 0.0)


def test_soliton_coefficient_sign():
    p = 0.8811181717481656 + 1j
    reg = SolitonConfig((1, 1), (2, 1), (p,), conj_phase=PHASE_REGULAR)
    pap = SolitonConfig((1, 1), (2, 1), (p.conjugate(),), conj_phase=PHASE_DEFAULT)
    assert soliton_coefficient(reg, 1) == pytest.approx(1 / p.real)
    assert soliton_coefficient(pap, 1) == pytest.approx(1 / p.real)


def test_field_jets_match_finite_differences(exact):
    cfg = exact[2]
    x, t = np.array([0.4]), np.array([0.1])
    u1, _, _ = field_jets(cfg, x, t)
    h = 1e-5
    f = lambda xx, tt: fields(cfg, np.array([xx]), np.array([tt])).u1[0]
    fx = (f(x[0] + h, t[0]) - f(x[0] - h, t[0])) / (2 * h)
    ft = (f(x[0], t[0] + h) - f(x[0], t[0] - h)) / (2 * h)
    assert u1.derivative(1, 0)[0] == pytest.approx(fx, rel=1e-6)
    assert u1.derivative(0, 1)[0] == pytest.approx(ft, rel=1e-6)
    assert u1.value[0] == pytest.approx(f(x[0], t[0]), rel=1e-13)


def test_interaction_constants(rounded2):
    k = interaction_constants(rounded2)
    assert 0 < k.M < 1
    for flow in (k.A1, k.A2, k.B1, k.B2):
        assert abs(flow) == pytest.approx(1.0)
    ps = phase_shifts(rounded2)
    assert ps.chi2 / ps.chi1 == pytest.approx(k.M)
    assert ps.gamma1 / ps.gamma2 == pytest.approx(k.M)


def test_n2_required(exact):
    with pytest.raises(ConfigError):
        interaction_constants(exact[1])
    with pytest.raises(ConfigError):
        asymptotic_field(exact[1], 1, "before", 0.0, 0.0)
    with pytest.raises(ConfigError):
        two_soliton_closed(exact[3], 0.0, 0.0)


def test_asymptotic_arguments(rounded2):
    with pytest.raises(ValueError):
        asymptotic_field(rounded2, 3, "before", 0.0, 0.0)
    with pytest.raises(ValueError):
        asymptotic_field(rounded2, 1, "during", 0.0, 0.0)


def test_velocities(rounded2):
    v1, v2 = soliton_velocity(rounded2, 1), soliton_velocity(rounded2, 2)
    assert v1 == pytest.approx(soliton_velocity(rounded2, 1, "moving") + rounded2.frame_speed)
    assert v2 > v1


@pytest.mark.parametrize("cfg_name", ["rounded2", "exact2"])
def test_collision(cfg_name, rounded2):
    cfg = rounded2 if cfg_name == "rounded2" else exact_config(2, (2, 1), (2.3, 1.5), (-1.0, -2.0))
    rep = collision_report(cfg)
    assert rep.T == pytest.approx(separation_time(cfg))
    assert rep.max_asym_error < 1e-6
    assert rep.max_shift_error < 1e-4
    assert rep.max_depth_change < 1e-8
    # the two shifts have opposite sense
    assert rep.shift_measured[1] * rep.shift_measured[2] < 0


def test_asymptotics_fail_near_collision(rounded2):
    x = np.linspace(-3, 3, 101)
    full = fields(rounded2, x, 0 * x)
    approx = asymptotic_field(rounded2, 1, "after", x, 0 * x)
    assert np.max(np.abs(full.u1 - approx.u1)) > 1e-3


def test_no_warnings_on_regular_branch(rounded2):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        asymptotic_field(rounded2, 1, "before", 0.0, -2.0)
