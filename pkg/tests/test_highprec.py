import numpy as np
import pytest
from mpmath import mp

from speclab import assemble, highprec
from speclab.trigpoly import CoefficientPair, TrigPoly

from oracles import quad_dirichlet_matrix, quad_periodic_matrix

P_SMOOTH = TrigPoly(cos_coeffs=[0.8], sin_coeffs=[0.2])
Q_MIXED = TrigPoly(mean=0.4, cos_coeffs=[1.0], sin_coeffs=[0.0, 0.5])
CP = CoefficientPair(P_SMOOTH, Q_MIXED)


def _to_np(H):
    return np.array([[float(H[i, j]) for j in range(H.cols)]
                     for i in range(H.rows)])


@pytest.mark.parametrize("t", [0.0, 0.23])
@pytest.mark.parametrize("order", [2, 4])
def test_periodic_matrix_matches_float64_and_quadrature(order, t):
    with mp.workdps(30):
        H = _to_np(highprec.periodic_matrix_hp(CP, order, mp.mpf(t), 8))
    if order == 4:
        F = assemble.fourth_periodic(CP, t, 8).entries
    else:
        F = assemble.second_periodic(CP.q, t, 8).entries
    arg = CP if order == 4 else CP.q
    Q = quad_periodic_matrix(arg, order, t, 8)
    scale = 1.0 + np.abs(F).max()     # the (pi N)^order diagonal head
    assert np.abs(H - F).max() < 1e-13 * scale
    assert np.abs(H - Q).max() < 1e-12 * scale


@pytest.mark.parametrize("t", [0.0, 0.23])
@pytest.mark.parametrize("order", [2, 4])
def test_dirichlet_matrix_matches_float64_and_quadrature(order, t):
    with mp.workdps(30):
        H = _to_np(highprec.dirichlet_matrix_hp(CP, order, mp.mpf(t), 8))
    if order == 4:
        F = assemble.fourth_dirichlet(CP, t, 8).entries
    else:
        F = assemble.second_dirichlet(CP.q, t, 8).entries
    arg = CP if order == 4 else CP.q
    Q = quad_dirichlet_matrix(arg, order, t, 8)
    scale = 1.0 + np.abs(F).max()     # the (pi N)^order diagonal head
    assert np.abs(H - F).max() < 1e-13 * scale
    assert np.abs(H - Q).max() < 1e-12 * scale


def test_eigenvalues_match_float64_solver():
    with mp.workdps(30):
        H = highprec.periodic_matrix_hp(CP, 4, mp.mpf(0), 10)
        vals = np.array([float(v) for v in highprec.eigenvalues_hp(H)])
    ref = np.linalg.eigvalsh(assemble.fourth_periodic(CP, 0.0, 10).entries)
    assert np.abs(vals - ref).max() < 1e-8 * (1.0 + np.abs(ref).max())


def test_residual_decay_below_the_float64_floor():
    """For an even potential the raw Hill residual keeps shrinking far
    below anything double precision can see."""
    r = highprec.second_residuals_hp(TrigPoly(cos_coeffs=[1.0]), 0.0,
                                     (6, 12), 64, dps=30)
    assert r[6] < 1e-15
    assert r[12] < 1e-3 * r[6]


def test_residuals_agree_with_float64_at_resolvable_scale():
    """Where the residual is large enough for float64 to resolve, both
    backends must report the same number."""
    from speclab import traceform
    rep = traceform.second_trace(Q_MIXED, 0.3, 4, 48)
    r = highprec.second_residuals_hp(Q_MIXED, 0.3, (4,), 48, dps=30)
    assert r[4] == pytest.approx(rep.residual_raw, rel=1e-6)
