"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A parameter violates its documented domain (shape, sign, range)."""


class ConvergenceError(ArithmeticError):
    """A truncated series failed its stopping rule within the term budget.

    Carries the partial sum and the number of terms consumed so callers can
    inspect how far the evaluation got.
    """

    def __init__(self, message, partial=None, terms=None):
        super().__init__(message)
        self.partial = partial
        self.terms = terms


class AccuracyError(ArithmeticError):
    """A quadrature or contour integral exhausted refinement above tolerance.

    ``best`` holds the last (most refined) estimate, ``error_estimate`` the
    disagreement between the final two refinement levels.
    """

    def __init__(self, message, best=None, error_estimate=None):
        super().__init__(message)
        self.best = best
        self.error_estimate = error_estimate
