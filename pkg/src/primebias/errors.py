"""Error taxonomy shared by every module.

DomainError maps to CLI exit code 1, NumericError to exit code 2.
"""


class DomainError(ValueError):
    """Input outside the documented domain of an operation."""


class CapacityError(DomainError):
    """Input within the mathematical domain but beyond the supported size."""


class UnsupportedModeError(DomainError):
    """Operation does not support the requested mode (e.g. switched averaging for a <= 0)."""


class NumericError(RuntimeError):
    """Internal numeric routine failed to converge to its target accuracy."""
