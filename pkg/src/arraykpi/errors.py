"""Exception hierarchy shared by all modules."""


class ArrayKpiError(Exception):
    """Base class for errors raised by arraykpi."""


class ConfigurationError(ArrayKpiError, ValueError):
    """Invalid user-supplied parameter or scenario setting."""


class DomainError(ArrayKpiError, ValueError):
    """Argument outside the domain where a model is defined."""


class NumericError(ArrayKpiError, ArithmeticError):
    """A numerical procedure failed to converge or produced garbage."""


class ValidityError(ArrayKpiError, ValueError):
    """Model applied outside its physical validity regime."""


class DegenerateChannelError(ArrayKpiError, ArithmeticError):
    """A channel or combining vector has zero norm."""


class SingularChannelError(ArrayKpiError, ArithmeticError):
    """Channel matrix is numerically rank deficient."""
