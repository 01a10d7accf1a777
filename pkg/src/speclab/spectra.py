"""Labeled spectra of the truncated operators and asymptotic references.

Labeling is positional after an ascending sort, matching the
counted-with-multiplicities convention: index 0 is the lowest periodic
eigenvalue, indices 2n-1 and 2n form the n-th pair.  Only indices
n <= N/4 are trusted; eigenvalues near the truncation edge are
discarded.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import assemble
from .errors import SolverError
from .trigpoly import CoefficientPair

__all__ = [
    "PeriodicSpectrum",
    "DirichletSpectrum",
    "eigensolve",
    "periodic_spectrum",
    "dirichlet_spectrum",
    "asymptotic_reference",
    "asymptotic_defect",
    "trusted_count",
]


def trusted_count(N: int) -> int:
    return N // 4


@dataclass(frozen=True)
class PeriodicSpectrum:
    """2-periodic eigenvalues lambda_0^+ <= lambda_1^- <= lambda_1^+ <= ..."""

    lambda0_plus: float
    pairs: np.ndarray       # shape (M_use, 2): (lambda_n^-, lambda_n^+)
    order: int
    N: int

    @property
    def M_use(self) -> int:
        return self.pairs.shape[0]


@dataclass(frozen=True)
class DirichletSpectrum:
    """Ascending Dirichlet-type eigenvalues mu_1 <= mu_2 <= ... at shift t."""

    t: float
    mu: np.ndarray
    order: int
    N: int

    @property
    def M_use(self) -> int:
        return len(self.mu)


def eigensolve(mat: assemble.OperatorMatrix) -> np.ndarray:
    """All eigenvalues of a real symmetric operator matrix, ascending."""
    try:
        return np.linalg.eigvalsh(mat.entries)
    except np.linalg.LinAlgError as exc:
        raise SolverError("symmetric eigensolver failed to converge") from exc


def periodic_spectrum(cp: CoefficientPair, order: int,
                      N: int) -> PeriodicSpectrum:
    """Labeled 2-periodic spectrum; order 2 uses the potential q."""
    if order == 4:
        mat = assemble.fourth_periodic(cp, 0.0, N)
    elif order == 2:
        mat = assemble.second_periodic(cp.q, 0.0, N)
    else:
        raise ValueError("order must be 2 or 4")
    vals = eigensolve(mat)
    M_use = trusted_count(N)
    pairs = np.column_stack([vals[1:2 * M_use:2], vals[2:2 * M_use + 1:2]])
    return PeriodicSpectrum(float(vals[0]), pairs, order, N)


def dirichlet_spectrum(cp: CoefficientPair, order: int, t: float,
                       N: int) -> DirichletSpectrum:
    """Ascending Dirichlet-type spectrum of the coefficients shifted by t."""
    if order == 4:
        mat = assemble.fourth_dirichlet(cp, t, N)
    elif order == 2:
        mat = assemble.second_dirichlet(cp.q, t, N)
    else:
        raise ValueError("order must be 2 or 4")
    vals = eigensolve(mat)
    return DirichletSpectrum(t, vals[:trusted_count(N)].copy(), order, N)


def asymptotic_reference(cp: CoefficientPair, n: int, order: int = 4) -> float:
    """Leading asymptotic value of the n-th eigenvalue.

    Order 4: (pi n)^4 - 2 p0 (pi n)^2 + (p0^2 - ||p||^2)/2 + q0.
    Order 2: (pi n)^2 + q0 (the O(1) head for a constant potential).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    p0, pnorm2 = cp.p.mean_and_norm()
    q0 = cp.q.mean
    if order == 4:
        return ((np.pi * n) ** 4 - 2.0 * p0 * (np.pi * n) ** 2
                + 0.5 * (p0 ** 2 - pnorm2) + q0)
    if order == 2:
        return (np.pi * n) ** 2 + q0
    raise ValueError("order must be 2 or 4")


def asymptotic_defect(spec, cp: CoefficientPair):
    """Per-index deviation from the asymptotic reference.

    For a periodic spectrum returns rows (n, avg_defect, max_defect) with
    avg = (lambda_n^+ + lambda_n^-)/2 - ref and max the larger of the two
    individual deviations in absolute value; for a Dirichlet spectrum
    rows (n, defect).
    """
    rows = []
    if isinstance(spec, PeriodicSpectrum):
        for n in range(1, spec.M_use + 1):
            ref = asymptotic_reference(cp, n, spec.order)
            lm, lp = spec.pairs[n - 1]
            dm, dp = lm - ref, lp - ref
            avg = 0.5 * (lm + lp) - ref
            worst = dm if abs(dm) >= abs(dp) else dp
            rows.append((n, avg, worst))
    elif isinstance(spec, DirichletSpectrum):
        for n in range(1, spec.M_use + 1):
            ref = asymptotic_reference(cp, n, spec.order)
            rows.append((n, spec.mu[n - 1] - ref))
    else:
        raise TypeError("expected PeriodicSpectrum or DirichletSpectrum")
    return rows
