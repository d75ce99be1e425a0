import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from ccmkdv.errors import NoSignChangeError, SingularParameterError
from ccmkdv.reduction import (RESIDUAL_TOL, family_scan, reduction_lhs_complex, reduction_residual, solve_p,
                              solve_re)


def test_rounded_one_soliton_parameter_is_close():
    assert abs(reduction_residual(0.88 + 1j, (1, 1), (2, 1))) < 0.01


def test_rounded_two_soliton_parameters_are_close():
    assert abs(reduction_residual(1.53 + 1j, (2, 1), (2.3, 1.5))) < 0.02
    assert abs(reduction_residual(1.49 + 2j, (2, 1), (2.3, 1.5))) < 0.02


def test_known_roots():
    assert solve_re(1.0, (1, 1), (2, 1)) == pytest.approx(0.8811181717481656, abs=1e-13)
    assert solve_re(1.0, (2, 1), (2.3, 1.5)) == pytest.approx(1.5260761888746703, abs=1e-13)
    assert solve_re(2.0, (2, 1), (2.3, 1.5)) == pytest.approx(1.497291309649451, abs=1e-13)


def test_root_is_even_in_imaginary_part():
    assert solve_re(-1.0, (1, 1), (2, 1)) == solve_re(1.0, (1, 1), (2, 1))


def test_single_component():
    re_p = solve_re(0.0, (1, 0), (1, 5), bracket=(0.1, 1.0))
    assert abs(reduction_residual(complex(re_p, 0), (1, 0), (1, 5))) < RESIDUAL_TOL


def test_no_root():
    with pytest.raises(NoSignChangeError) as info:
        solve_re(1.0, (0.01, 0.01), (2, 1))
    assert info.value.residual_lo < 0 and info.value.residual_hi < 0


def test_bad_bracket():
    with pytest.raises(ValueError):
        solve_re(1.0, (1, 1), (2, 1), bracket=(1.0, 0.5))
    with pytest.raises(ValueError):
        solve_re(1.0, (1, 1), (2, 1), bracket=(0.0, 1.0))


def test_pole():
    with pytest.raises(SingularParameterError):
        reduction_residual(2j, (1, 1), (2, 1))


def test_zero_amplitude_component_ignored():
    assert reduction_residual(1 + 1j, (1, 0), (2, 0.0)) == reduction_residual(1 + 1j, (1, 0), (2, 7.0))


def test_family_scan_records_failures():
    scan = family_scan((1, 1), (2, 1), (-2, 8, 6))
    assert scan.points and scan.failures
    assert all(abs(q.residual) < RESIDUAL_TOL for q in scan.points)
    with pytest.raises(ValueError):
        family_scan((1, 1), (2, 1), (0, 1, 1))


@given(st.floats(-2.5, 2.5), st.floats(0.3, 3), st.floats(0.3, 3), st.floats(0.5, 3), st.floats(0.2, 3))
def test_solver_reaches_tolerance(im, r1, r2, a1, a2):
    try:
        re_p = solve_re(im, (r1, r2), (a1, a2))
    except NoSignChangeError:
        assume(False)
    p = complex(re_p, im)
    assert abs(reduction_residual(p, (r1, r2), (a1, a2))) < RESIDUAL_TOL
    assert 0.1 <= re_p <= 3.0


@given(st.complex_numbers(max_magnitude=4).filter(lambda z: abs(z.real) > 1e-3), st.floats(0.1, 3), st.floats(0.1, 3))
def test_condition_is_real(p, r, a):
    z = reduction_lhs_complex(p, (r, r), (a, 2 * a))
    assume(np.isfinite(z) and abs(z) < 1e12)
    assert abs(z.imag) <= 1e-12 * max(1.0, abs(z))
    assert z.real == pytest.approx(1 + reduction_residual(p, (r, r), (a, 2 * a)), rel=1e-10)


def test_solve_p_returns_complex():
    p = solve_p(1.0, (1, 1), (2, 1))
    assert isinstance(p, complex) and p.imag == 1.0
