import numpy as np
import pytest

from speclab import assemble
from speclab.trigpoly import CoefficientPair, TrigPoly

from oracles import (quad_dirichlet_matrix, quad_multiplication_matrix,
                     quad_periodic_matrix)

ZERO = TrigPoly()
COS1 = TrigPoly(cos_coeffs=[1.0])
MIXED_P = TrigPoly(cos_coeffs=[1.0, 0.0], sin_coeffs=[0.3, -0.5])
MIXED_Q = TrigPoly(mean=0.4, cos_coeffs=[-0.7], sin_coeffs=[0.0, 1.1])


def test_free_matrices_are_diagonal():
    cp = CoefficientPair(ZERO, ZERO)
    m = np.concatenate([[0], np.arange(1, 9), np.arange(1, 9)])
    A = assemble.fourth_periodic(cp, 0.0, 8).entries
    assert np.allclose(A, np.diag((np.pi * m) ** 4), atol=1e-9)
    D = assemble.fourth_dirichlet(cp, 0.0, 8).entries
    assert np.allclose(D, np.diag((np.pi * np.arange(1, 9)) ** 4), atol=1e-9)


def test_exp2_single_cosine_coupling_against_quadrature():
    # q = cos 2 pi x couples modes two apart; the coupling value is read
    # off the quadrature oracle rather than asserted a priori
    A = assemble.second_periodic(COS1, 0.0, 8).entries
    Q = quad_periodic_matrix(COS1, 2, 0.0, 8)
    assert np.abs(A - Q).max() < 1e-10
    # in the cos/sin blocks the nonzero couplings sit at |m-k| = 2
    assert A[1, 3] == pytest.approx(0.5, abs=1e-12)
    assert A[0, 2] == pytest.approx(1.0 / np.sqrt(2.0), abs=1e-12)


@pytest.mark.parametrize("t", [0.0, 0.23])
def test_fourth_periodic_against_quadrature(t):
    cp = CoefficientPair(MIXED_P, MIXED_Q)
    A = assemble.fourth_periodic(cp, t, 10).entries
    Q = quad_periodic_matrix(cp, 4, t, 10)
    assert np.abs(A - Q).max() < 1e-9
    assert np.abs(A - A.T).max() == 0.0


@pytest.mark.parametrize("t", [0.0, 0.23])
def test_second_periodic_against_quadrature(t):
    A = assemble.second_periodic(MIXED_Q, t, 10).entries
    Q = quad_periodic_matrix(MIXED_Q, 2, t, 10)
    assert np.abs(A - Q).max() < 1e-10


@pytest.mark.parametrize("t", [0.0, 0.23])
def test_fourth_dirichlet_against_quadrature(t):
    cp = CoefficientPair(MIXED_P, MIXED_Q)
    A = assemble.fourth_dirichlet(cp, t, 12).entries
    Q = quad_dirichlet_matrix(cp, 4, t, 12)
    assert np.abs(A - Q).max() < 1e-9


@pytest.mark.parametrize("t", [0.0, 0.23])
def test_second_dirichlet_against_quadrature(t):
    A = assemble.second_dirichlet(MIXED_Q, t, 12).entries
    Q = quad_dirichlet_matrix(MIXED_Q, 2, t, 12)
    assert np.abs(A - Q).max() < 1e-11


def test_multiplication_matrix_against_quadrature():
    for basis in ("exp2", "sine1"):
        V = assemble.multiplication_matrix(MIXED_Q, basis, 10)
        Q = quad_multiplication_matrix(MIXED_Q, basis, 10)
        assert np.abs(V - Q).max() < 1e-10


def test_truncation_validation():
    cp = CoefficientPair(ZERO, TrigPoly(cos_coeffs=[0, 0, 0, 1.0]))
    with pytest.raises(ValueError):
        assemble.fourth_periodic(cp, 0.0, 3)
    with pytest.raises(ValueError):
        assemble.fourth_periodic(cp, 0.0, 0)
    with pytest.raises(ValueError):
        assemble.second_periodic(TrigPoly(period=2.0), 0.0, 8)


# ----------------------------------------------------------------------
# finite-difference oracle
# ----------------------------------------------------------------------

def test_fd_matrix_applies_the_operator():
    """A(u_grid) must converge at O(h^2) to the differential expression."""
    cp = CoefficientPair(COS1, MIXED_Q)
    errs = []
    for M in (256, 512):
        A, _ = assemble.fd_matrix(cp, 0.0, "fourth_periodic", M)
        x = np.arange(M) * (2.0 / M)
        w = np.cos(np.pi * x) + 0.2 * np.sin(2 * np.pi * x)
        dw = -np.pi * np.sin(np.pi * x) + 0.4 * np.pi * np.cos(2 * np.pi * x)
        d2w = (-np.pi ** 2 * np.cos(np.pi * x)
               - 0.8 * np.pi ** 2 * np.sin(2 * np.pi * x))
        d4w = (np.pi ** 4 * np.cos(np.pi * x)
               + 3.2 * np.pi ** 4 * np.sin(2 * np.pi * x))
        exact = (d4w + 2 * cp.p.eval(x) * d2w
                 + 2 * cp.p.derivative(1).eval(x) * dw + cp.q.eval(x) * w)
        errs.append(np.abs(A @ w - exact).max())
    assert errs[1] < errs[0] / 3.0              # about h^2


def test_fd_matrix_symmetry_flag_and_validation():
    cp = CoefficientPair(COS1, MIXED_Q)
    _, symm = assemble.fd_matrix(cp, 0.0, "fourth_dirichlet", 64)
    assert not symm
    _, symm = assemble.fd_matrix(CoefficientPair(ZERO, MIXED_Q), 0.0,
                                 "fourth_dirichlet", 64)
    assert symm
    with pytest.raises(ValueError):
        assemble.fd_matrix(cp, 0.0, "fourth_dirichlet", 32)
    with pytest.raises(ValueError):
        assemble.fd_matrix(cp, 0.0, "sixth_dirichlet", 128)


@pytest.mark.parametrize("problem", assemble.FD_PROBLEMS)
def test_fd_lowest_matches_dense_eigensolve(problem):
    cp = CoefficientPair(COS1, MIXED_Q)
    M, k = 128, 8
    vals = assemble.fd_lowest(cp, 0.1, problem, M, k=k)
    A, symm = assemble.fd_matrix(cp, 0.1, problem, M)
    dense = np.linalg.eigvalsh(A.toarray()) if symm else \
        np.sort(np.linalg.eigvals(A.toarray()).real)
    assert np.abs(vals - dense[:k]).max() < 1e-8 * (1 + np.abs(dense[:k])).max()


def test_fd_lowest_is_ascending_and_deterministic():
    cp = CoefficientPair(COS1, MIXED_Q)
    a = assemble.fd_lowest(cp, 0.0, "fourth_periodic", 256)
    b = assemble.fd_lowest(cp, 0.0, "fourth_periodic", 256)
    assert np.array_equal(a, b)
    assert np.all(np.diff(a) >= 0)


def test_richardson_cancels_power_series():
    # synthetic eigenvalue tables with a pure h^2 + h^4 error expansion
    truth = np.array([1.0, 10.0])
    tables = []
    for M in (8, 16, 32):
        h2 = (1.0 / M) ** 2
        tables.append(truth + 3.0 * h2 + 50.0 * h2 ** 2)
    out = assemble.richardson(tables)
    assert np.abs(out - truth).max() < 1e-12
    with pytest.raises(ValueError):
        assemble.richardson([truth])


def test_richardson_lowest_validates_grid_doubling():
    cp = CoefficientPair(ZERO, COS1)
    with pytest.raises(ValueError):
        assemble.richardson_lowest(cp, 0.0, "second_dirichlet",
                                   grids=(128, 192))
