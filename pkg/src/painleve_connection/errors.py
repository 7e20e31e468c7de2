"""Exception types raised across the package."""


class PainleveError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(PainleveError, ValueError):
    pass


class OutOfRangeError(PainleveError, ValueError):
    pass


class UnsupportedDomainError(PainleveError, ValueError):
    pass


class PoleError(PainleveError, ValueError):
    """Gamma evaluated at a non-positive integer."""


class OverflowEvaluationError(PainleveError, OverflowError):
    pass


class UnsupportedSectorError(PainleveError, ValueError):
    pass


class IntegrationError(PainleveError, RuntimeError):
    """Step-size underflow or another failure of the ODE integration.

    ``last_x`` is the last abscissa reached with an accepted step.
    """

    def __init__(self, message, last_x=None):
        super().__init__(message)
        self.last_x = last_x


class BlowUpError(IntegrationError):
    pass


class InconsistentCrossingError(IntegrationError):
    pass


class SingularTransformError(PainleveError, ValueError):
    """A transformation denominator vanishes (e.g. Phi' = 1 in h)."""


class NotAsymptoticError(PainleveError, ValueError):
    pass


class ClassificationConflictError(PainleveError, ValueError):
    pass


class BracketingError(PainleveError, ValueError):
    pass


class PathSingularityError(PainleveError, ValueError):
    pass


class SingularCoefficientError(PainleveError, ValueError):
    pass


class ConditioningError(PainleveError, ArithmeticError):
    pass
