"""Trace-formula series, the F functional, and the resolvent contour integral.

The series terms pair eigenvalues sharing the same n^4 head before
summation, (lambda_n^+ - mu_n) + (lambda_n^- - mu_n), which suppresses
cancellation between O(n^4) quantities.  Partial sums are reported raw
plus a single Aitken delta-squared step; no tail bound is claimed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import assemble, spectra
from .errors import TrustedRangeError
from .trigpoly import CoefficientPair, TrigPoly, effective_potential

__all__ = [
    "TraceReport",
    "ContourResult",
    "SweepResult",
    "fourth_trace",
    "second_trace",
    "s01_trace",
    "F_of_lambda",
    "F_matrix",
    "contour_functional",
    "sweep_trace",
    "contour_radius",
]


@dataclass(frozen=True)
class TraceReport:
    """Per-term data of one trace-formula evaluation."""

    x: float
    terms: np.ndarray          # d_n, n = 1..M
    partial_sums: np.ndarray   # length M+1; [0] is the leading term
    extrapolated: float
    target: float
    residual_raw: float
    residual_extrapolated: float
    M: int
    N: int


@dataclass(frozen=True)
class ContourResult:
    """One contour-functional evaluation on the circle |lambda|^(1/4) =
    pi (n + 1/2)."""

    n: int
    radius: float
    Q: int
    value: complex
    target: float
    N: int


@dataclass(frozen=True)
class SweepResult:
    reports: list
    grid_average: float        # average of final partial sums over the grid
    grid_average_target: float  # q0: the p'' term averages to zero


def _aitken(s: np.ndarray) -> float:
    """One Aitken delta-squared step on the tail of the partial sums."""
    if len(s) < 3:
        return float(s[-1])
    s0, s1, s2 = s[-3], s[-2], s[-1]
    denom = (s2 - s1) - (s1 - s0)
    if abs(denom) < 1e-13 * (1.0 + abs(s2)):
        return float(s2)
    return float(s2 - (s2 - s1) ** 2 / denom)


def _check_M(M: int, N: int):
    if M < 1:
        raise ValueError("M must be >= 1")
    if M > spectra.trusted_count(N):
        raise TrustedRangeError(
            "M=%d exceeds the trusted range N/4=%d" % (M, N // 4))


def _report(x, leading, terms, target, M, N) -> TraceReport:
    partial = leading + np.concatenate([[0.0], np.cumsum(terms)])
    extrap = _aitken(partial)
    return TraceReport(
        x=float(x), terms=terms, partial_sums=partial,
        extrapolated=extrap, target=float(target),
        residual_raw=abs(float(partial[-1]) - float(target)),
        residual_extrapolated=abs(extrap - float(target)),
        M=M, N=N)


def fourth_trace(cp: CoefficientPair, x: float, M: int, N: int,
                 _lam: spectra.PeriodicSpectrum | None = None) -> TraceReport:
    """Series lambda_0^+ + sum(lambda_n^+ + lambda_n^- - 2 mu_n(x))
    against the target q(x) - p''(x)/2."""
    _check_M(M, N)
    lam = _lam if _lam is not None else spectra.periodic_spectrum(cp, 4, N)
    mu = spectra.dirichlet_spectrum(cp, 4, x, N)
    n = np.arange(M)
    terms = ((lam.pairs[n, 1] - mu.mu[n]) + (lam.pairs[n, 0] - mu.mu[n]))
    target = cp.q.eval(x) - 0.5 * cp.p.derivative(2).eval(x)
    return _report(x, lam.lambda0_plus, terms, target, M, N)


def second_trace(q: TrigPoly, x: float, M: int, N: int) -> TraceReport:
    """Hill-operator series alpha_0^+ + sum(alpha_n^+ + alpha_n^- -
    2 beta_n(x)) against the target q(x)."""
    _check_M(M, N)
    cp = CoefficientPair(TrigPoly(), q)
    al = spectra.periodic_spectrum(cp, 2, N)
    be = spectra.dirichlet_spectrum(cp, 2, x, N)
    n = np.arange(M)
    terms = ((al.pairs[n, 1] - be.mu[n]) + (al.pairs[n, 0] - be.mu[n]))
    return _report(x, al.lambda0_plus, terms, q.eval(x), M, N)


def s01_trace(p: TrigPoly, M: int, N: int) -> TraceReport:
    """Squared-eigenvalue series for -y'' - p y against the target
    p(0)^2 + p''(0)/2."""
    _check_M(M, N)
    cp = CoefficientPair(TrigPoly(), -p)       # potential -p
    al = spectra.periodic_spectrum(cp, 2, N)
    be = spectra.dirichlet_spectrum(cp, 2, 0.0, N)
    n = np.arange(M)
    terms = ((al.pairs[n, 1] ** 2 - be.mu[n] ** 2)
             + (al.pairs[n, 0] ** 2 - be.mu[n] ** 2))
    target = p.eval(0.0) ** 2 + 0.5 * p.derivative(2).eval(0.0)
    return _report(0.0, al.lambda0_plus ** 2, terms, target, M, N)


# ----------------------------------------------------------------------
# the F functional
# ----------------------------------------------------------------------

def _check_pole(lam: complex, poles: np.ndarray):
    if np.min(np.abs(poles - lam)) <= 1e-6 * (1.0 + abs(lam)):
        raise ValueError("lambda is too close to a free eigenvalue")


def F_of_lambda(cp: CoefficientPair, lam: complex, N: int) -> complex:
    """Closed form -V0/lambda + sum_n 2 V_cn / ((pi n)^4 - lambda) from
    the Fourier data of the effective potential."""
    V = effective_potential(cp)
    n = np.arange(1, N + 1)
    poles = np.concatenate([[0.0], (np.pi * n) ** 4]).astype(complex)
    _check_pole(lam, poles)
    Vc = np.array([V.fourier_on_unit(k)[0] for k in n])
    return complex(-V.mean / lam + np.sum(2.0 * Vc / ((np.pi * n) ** 4 - lam)))


def F_matrix(cp: CoefficientPair, lam: complex, N: int) -> complex:
    """Same functional from truncated matrices:
    Tr(V (h2_free^2 - lambda)^-1) - 2 Tr(V (h1_free^2 - lambda)^-1)."""
    V = effective_potential(cp)
    m2 = np.concatenate([[0], np.arange(1, N + 1), np.arange(1, N + 1)])
    d2 = (np.pi * m2) ** 4                     # realified exp2 free, squared
    m1 = np.arange(1, N + 1)
    d1 = (np.pi * m1) ** 4                     # sine1 free, squared
    _check_pole(lam, np.concatenate([d2, d1]).astype(complex))
    V2 = assemble.multiplication_matrix(V, "exp2", N)
    V1 = assemble.multiplication_matrix(V, "sine1", N)
    tr2 = np.trace(np.linalg.solve(np.diag(d2 - lam).astype(complex), V2))
    tr1 = np.trace(np.linalg.solve(np.diag(d1 - lam).astype(complex), V1))
    return complex(tr2 - 2.0 * tr1)


# ----------------------------------------------------------------------
# resolvent contour functional
# ----------------------------------------------------------------------

def contour_radius(n: int) -> float:
    return (np.pi * (n + 0.5)) ** 4


def contour_functional(cp: CoefficientPair, n: int, Q: int,
                       N: int) -> ContourResult:
    """(1/2 pi i) \\oint lambda Phi(lambda) d lambda on the circle of
    radius (pi (n+1/2))^4, by the trapezoid rule in the angle.

    Phi(lambda) = Tr(H2-lambda)^-1 - Tr(h2^2-lambda)^-1
                  - 2 [Tr(H1-lambda)^-1 - Tr(h1^2-lambda)^-1],
    with the second-order operators carrying the potential -p.
    """
    if n < 1:
        raise ValueError("contour index n must be >= 1")
    if Q < 64:
        raise ValueError("quadrature count Q must be >= 64")
    if n > N // 8:
        raise TrustedRangeError(
            "contour index n=%d exceeds trusted range N/8=%d" % (n, N // 8))
    minus_p = -cp.p
    L2 = spectra.eigensolve(assemble.fourth_periodic(cp, 0.0, N))
    L1 = spectra.eigensolve(assemble.fourth_dirichlet(cp, 0.0, N))
    h2 = spectra.eigensolve(assemble.second_periodic(minus_p, 0.0, N)) ** 2
    h1 = spectra.eigensolve(assemble.second_dirichlet(minus_p, 0.0, N)) ** 2

    r = contour_radius(n)
    allv = np.concatenate([L2, L1, h2, h1])
    gap = np.min(np.abs(np.abs(allv) - r))
    if gap < 1e-6 * r:
        raise ValueError(
            "contour of index n=%d passes within %.1e of an eigenvalue; "
            "try a different n" % (n, gap))

    theta = 2.0 * np.pi * np.arange(Q) / Q
    lam = r * np.exp(1j * theta)
    phi = (np.sum(1.0 / (L2[None, :] - lam[:, None]), axis=1)
           - np.sum(1.0 / (h2[None, :] - lam[:, None]), axis=1)
           - 2.0 * np.sum(1.0 / (L1[None, :] - lam[:, None]), axis=1)
           + 2.0 * np.sum(1.0 / (h1[None, :] - lam[:, None]), axis=1))
    value = complex(np.sum(lam ** 2 * phi) / Q)
    target = -float(effective_potential(cp).eval(0.0))
    return ContourResult(n=n, radius=r, Q=Q, value=value, target=target, N=N)


def sweep_trace(cp: CoefficientPair, x_grid, M: int, N: int) -> SweepResult:
    """Fourth-order trace report at each grid point, reusing the
    (shift-invariant) periodic spectrum."""
    _check_M(M, N)
    lam = spectra.periodic_spectrum(cp, 4, N)
    reports = [fourth_trace(cp, float(x), M, N, _lam=lam) for x in x_grid]
    finals = np.array([rep.partial_sums[-1] for rep in reports])
    return SweepResult(reports=reports,
                       grid_average=float(np.mean(finals)),
                       grid_average_target=float(cp.q.mean))
