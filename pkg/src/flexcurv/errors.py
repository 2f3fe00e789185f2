"""Exception hierarchy.

The CLI maps :class:`ValidationError` to exit code 2 and
:class:`NumericalDomainError` to exit code 3.
"""


class FlexcurvError(Exception):
    pass


class ValidationError(FlexcurvError, ValueError):
    """Bad user input: unparsable expressions, bad domains, bad scenarios."""


class NumericalDomainError(FlexcurvError, ArithmeticError):
    """A computation left its domain of definition (log of a negative, singular metric, ...)."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class PreconditionError(ValidationError):
    """A field handed to a flex-dependent routine is not an infinitesimal flex."""

    def __init__(self, message, worst_residual=None, point=None):
        super().__init__(message)
        self.worst_residual = worst_residual
        self.point = point
