"""Exception and warning types raised across the package."""


class CcmkdvError(Exception):
    """Base class for all package errors."""


class ConfigError(CcmkdvError, ValueError):
    """Invalid soliton or run configuration."""


class ReductionConditionError(ConfigError):
    """A spectral parameter misses the reduction condition beyond tolerance."""


class CoincidentParameterError(ConfigError):
    """Two spectral parameters coincide where a denominator would vanish."""


class SingularParameterError(CcmkdvError, ZeroDivisionError):
    """A tau-function entry or constraint term has a vanishing denominator."""


class OrderBoundError(CcmkdvError, ValueError):
    """Matrix order or soliton count exceeds the configured expansion bound."""


class NonFiniteResultError(CcmkdvError, ArithmeticError):
    """A numeric kernel produced inf or nan (overflow)."""


class NearSingularError(CcmkdvError, ArithmeticError):
    """The tau function f is numerically zero at a requested point."""

    def __init__(self, message, x=None, t=None):
        super().__init__(message)
        self.x = x
        self.t = t


class NoSignChangeError(CcmkdvError, ValueError):
    """Root bracket does not contain a sign change of the residual."""

    def __init__(self, message, residual_lo=None, residual_hi=None):
        super().__init__(message)
        self.residual_lo = residual_lo
        self.residual_hi = residual_hi


class ConvergenceError(CcmkdvError, RuntimeError):
    """Iterative solver failed to converge."""


class InstabilityError(CcmkdvError, RuntimeError):
    """Time integration blew up."""


class BranchWarning(UserWarning):
    """A complex logarithm was taken across or on its branch cut."""


class DegenerateConfigWarning(UserWarning):
    """Configuration is accepted but lies in a degenerate corner."""
