"""Exception hierarchy shared by all speclab modules."""


class SpecLabError(Exception):
    """Base class for all speclab errors."""


class ConfigError(SpecLabError):
    """Malformed or invalid run configuration."""


class SolverError(SpecLabError):
    """An eigensolver or linear solver failed to converge."""


class TrustedRangeError(SpecLabError):
    """A requested index exceeds the trusted range of the truncation."""
