"""Exception types shared across the package."""


class DimensionMismatchError(ValueError):
    pass


class OutsideDomainError(ValueError):
    """A point lies on or outside the region where a quantity is defined."""


class DegenerateComparisonError(ZeroDivisionError):
    pass


class InvalidCandidateError(ValueError):
    """A candidate map violates its target constraint (e.g. leaves the ball)."""


class SingularMetricError(ValueError):
    pass


class StepSizeError(FloatingPointError):
    pass


class UnsupportedDomainError(TypeError):
    pass


class AccuracyNotReachedError(RuntimeError):
    """Quadrature refinement stopped before reaching the requested tolerance.

    The best available estimate and its error are kept on the exception.
    """

    def __init__(self, message, estimate, error):
        super().__init__(message)
        self.estimate = estimate
        self.error = error
