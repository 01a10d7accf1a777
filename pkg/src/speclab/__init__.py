"""speclab: spectra and trace formulas of periodic second- and
fourth-order differential operators on the circle."""

from .errors import ConfigError, SolverError, SpecLabError, TrustedRangeError
from .trigpoly import CoefficientPair, TrigPoly, effective_potential
from .assemble import (
    OperatorMatrix,
    fourth_dirichlet,
    fourth_periodic,
    second_dirichlet,
    second_periodic,
    fd_lowest,
    richardson,
    richardson_lowest,
)
from .spectra import (
    DirichletSpectrum,
    PeriodicSpectrum,
    asymptotic_defect,
    asymptotic_reference,
    dirichlet_spectrum,
    eigensolve,
    periodic_spectrum,
    trusted_count,
)
from .highprec import (
    dirichlet_matrix_hp,
    eigenvalues_hp,
    fourth_residuals_hp,
    periodic_matrix_hp,
    second_residuals_hp,
)
from .traceform import (
    ContourResult,
    SweepResult,
    TraceReport,
    F_matrix,
    F_of_lambda,
    contour_functional,
    fourth_trace,
    s01_trace,
    second_trace,
    sweep_trace,
)

__version__ = "0.1.0"
