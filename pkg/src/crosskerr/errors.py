"""Shared exception types.

The command line maps these onto exit codes: configuration problems
exit with 2, solver failures with 3, and validity-gate refusals with 4.
"""


class CrossKerrError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(CrossKerrError):
    """Invalid, inconsistent, or incomplete input parameters."""


class SolverError(CrossKerrError):
    """A numerical routine failed to converge or to meet its residual bound."""


class TruncationError(SolverError):
    """A truncated Hilbert space is too small for the requested state."""


class ValidityError(CrossKerrError):
    """A validity gate refused to run with the supplied parameters."""
