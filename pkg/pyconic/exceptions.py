"""
Exception hierarchy for pyconic.
"""


class ConicError(Exception):
    """Base class for all errors raised by pyconic."""


class ConfigError(ConicError, ValueError):
    """
    Invalid input parameters or experiment configuration.

    Attributes:
        key: Dotted path of the offending configuration key, if known
    """

    def __init__(self, message: str, key: str = ""):
        super().__init__(message)
        self.key = key


class SolverError(ConicError, RuntimeError):
    """Raised when a radial solve fails to converge or is degenerate."""


class CriticalWeightError(SolverError):
    """Raised when a solve is requested at a critical weight or branch."""


class FitError(ConicError, ValueError):
    """Raised when a power-law fit has failed preconditions or a poor residual."""


class InvariantViolation(ConicError, AssertionError):
    """Raised when an invariant check of an experiment fails."""
