import numpy as np
import pytest

from speclab import spectra, traceform
from speclab.errors import TrustedRangeError
from speclab.trigpoly import CoefficientPair, TrigPoly, effective_potential

ZERO = TrigPoly()
COS1 = TrigPoly(cos_coeffs=[1.0])
P_SMOOTH = TrigPoly(cos_coeffs=[0.8], sin_coeffs=[0.2])
Q_MIXED = TrigPoly(mean=0.4, cos_coeffs=[1.0], sin_coeffs=[0.0, 0.5])
CP = CoefficientPair(P_SMOOTH, Q_MIXED)


# ----------------------------------------------------------------------
# series reports
# ----------------------------------------------------------------------

def test_report_is_consistent_with_raw_spectra():
    """The final partial sum must equal the directly recomputed series."""
    N, M, x = 64, 12, 0.2
    rep = traceform.fourth_trace(CP, x, M, N)
    lam = spectra.periodic_spectrum(CP, 4, N)
    mu = spectra.dirichlet_spectrum(CP, 4, x, N)
    direct = lam.lambda0_plus + sum(
        lam.pairs[n, 0] + lam.pairs[n, 1] - 2.0 * mu.mu[n]
        for n in range(M))
    # the two summation orders differ only by roundoff at the scale of
    # the individual eigenvalues, about M * (pi M)^4 * eps
    assert rep.partial_sums[-1] == pytest.approx(direct, abs=1e-7)
    assert len(rep.partial_sums) == M + 1
    assert rep.partial_sums[0] == pytest.approx(lam.lambda0_plus)
    assert rep.residual_raw == pytest.approx(
        abs(rep.partial_sums[-1] - rep.target))


@pytest.mark.parametrize("x", [0.0, 0.3])
def test_fourth_trace_converges_to_local_target(x):
    """The series recovers q(x) - p''(x)/2 pointwise."""
    rep = traceform.fourth_trace(CP, x, 24, 128)
    assert rep.target == pytest.approx(
        Q_MIXED.eval(x) - 0.5 * P_SMOOTH.derivative(2).eval(x))
    # the double-precision eigensolve has backward error of order
    # eps * (pi N)^4 ~ 1e-5, which bounds what the residual can reach
    assert rep.residual_raw < 2e-4 * (1.0 + abs(rep.target))
    assert rep.residual_extrapolated < 2e-4 * (1.0 + abs(rep.target))


@pytest.mark.parametrize("x", [0.0, 0.3])
def test_second_trace_converges_to_potential(x):
    rep = traceform.second_trace(Q_MIXED, x, 24, 128)
    assert rep.target == pytest.approx(Q_MIXED.eval(x))
    assert rep.residual_raw < 1e-6
    assert rep.residual_extrapolated < 1e-8


def test_s01_trace_converges():
    rep = traceform.s01_trace(P_SMOOTH, 24, 128)
    assert rep.target == pytest.approx(
        P_SMOOTH.eval(0.0) ** 2 + 0.5 * P_SMOOTH.derivative(2).eval(0.0))
    assert rep.residual_raw < 1e-4 * (1.0 + abs(rep.target))


def test_trivial_and_constant_cases():
    # zero coefficients: every term vanishes and the target is zero
    rep = traceform.fourth_trace(CoefficientPair(ZERO, ZERO), 0.1, 8, 64)
    assert abs(rep.partial_sums[-1]) < 1e-8
    assert rep.target == 0.0
    # constant q = c: the series collapses to the constant
    c = 1.7
    rep = traceform.second_trace(TrigPoly(mean=c), 0.4, 8, 64)
    assert rep.residual_raw < 1e-9


def test_constant_shift_covariance():
    """Adding a constant to q moves the target and the sum together."""
    cp_c = CoefficientPair(P_SMOOTH, Q_MIXED + TrigPoly(mean=3.0))
    a = traceform.fourth_trace(CP, 0.2, 16, 96)
    b = traceform.fourth_trace(cp_c, 0.2, 16, 96)
    assert b.target - a.target == pytest.approx(3.0)
    assert b.partial_sums[-1] - a.partial_sums[-1] == pytest.approx(
        3.0, abs=1e-5)


def test_trusted_range_is_enforced():
    with pytest.raises(TrustedRangeError):
        traceform.fourth_trace(CP, 0.0, 17, 64)       # 17 > 64/4
    with pytest.raises(ValueError):
        traceform.second_trace(Q_MIXED, 0.0, 0, 64)


def test_sweep_average_recovers_the_mean():
    """Averaged over a full period the p'' term integrates away."""
    grid = np.linspace(0.0, 1.0, 16, endpoint=False)
    sw = traceform.sweep_trace(CP, grid, 16, 96)
    assert sw.grid_average_target == pytest.approx(Q_MIXED.mean)
    assert abs(sw.grid_average - sw.grid_average_target) < 1e-4
    assert len(sw.reports) == 16


# ----------------------------------------------------------------------
# the F functional
# ----------------------------------------------------------------------

def test_F_matrix_matches_closed_form():
    for lam in np.linspace(-4.0, 9.0, 20):
        a = traceform.F_matrix(CP, complex(lam), 40)
        b = traceform.F_of_lambda(CP, complex(lam), 40)
        assert abs(a - b) < 1e-10 * (1.0 + abs(b))


def test_F_rejects_lambda_at_a_pole():
    with pytest.raises(ValueError):
        traceform.F_of_lambda(CP, complex(np.pi ** 4), 40)
    with pytest.raises(ValueError):
        traceform.F_matrix(CP, 0.0 + 0.0j, 40)


def test_F_vanishes_for_zero_effective_potential():
    """p = q = 0 has zero effective potential, hence F = 0."""
    cp = CoefficientPair(ZERO, ZERO)
    assert abs(traceform.F_of_lambda(cp, 2.0 + 0.0j, 40)) < 1e-14
    assert abs(traceform.F_matrix(cp, 2.0 + 0.0j, 40)) < 1e-14


# ----------------------------------------------------------------------
# contour functional
# ----------------------------------------------------------------------

def test_contour_trivial_case_is_zero():
    cp = CoefficientPair(ZERO, ZERO)
    res = traceform.contour_functional(cp, 3, 128, 48)
    assert abs(res.value) < 1e-9
    assert res.target == 0.0


def test_contour_recovers_minus_effective_potential_at_zero():
    res = traceform.contour_functional(CP, 6, 256, 64)
    assert res.target == pytest.approx(-effective_potential(CP).eval(0.0))
    assert abs(res.value - res.target) < 0.05 * (1.0 + abs(res.target))


def test_contour_quadrature_is_saturated():
    """Trapezoid in the angle is spectrally accurate: doubling Q
    changes nothing."""
    a = traceform.contour_functional(CP, 4, 128, 64)
    b = traceform.contour_functional(CP, 4, 256, 64)
    assert abs(a.value - b.value) < 1e-8 * (1.0 + abs(b.value))


def test_contour_validation():
    with pytest.raises(ValueError):
        traceform.contour_functional(CP, 0, 128, 64)
    with pytest.raises(ValueError):
        traceform.contour_functional(CP, 3, 32, 64)
    with pytest.raises(TrustedRangeError):
        traceform.contour_functional(CP, 9, 128, 64)   # 9 > 64/8
