"""Exception hierarchy shared by every module."""


class CopulaRiskError(Exception):
    """Base class for all package errors."""


class DomainError(CopulaRiskError, ValueError):
    """An argument lies outside the domain of the requested operation."""


class UnreachableQuantileError(DomainError):
    """A probability level that the distribution never attains was requested."""


class NumericError(CopulaRiskError, ArithmeticError):
    """An iterative numerical method failed to meet its accuracy target."""


class PlausibilityWarning(RuntimeWarning):
    """Model parameters produce values outside their physical range."""
