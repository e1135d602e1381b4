"""Exception types shared by the numeric layers."""


class DomainError(ValueError):
    """Argument outside the domain an operation supports."""


class RangeError(OverflowError):
    """Result would overflow double precision."""


class ConvergenceError(ArithmeticError):
    """A series or iteration ran out of terms before meeting its tolerance."""

    def __init__(self, message: str, partial_sum=None, terms: int | None = None):
        super().__init__(message)
        self.partial_sum = partial_sum
        self.terms = terms


class ConsistencyError(ArithmeticError):
    """Two evaluation routes, or a value and its invariant, disagree."""


class IntegrationError(ArithmeticError):
    """ODE integration failed; ``tau`` records where."""

    def __init__(self, message: str, tau: float | None = None):
        super().__init__(message)
        self.tau = tau


class QuadratureError(ArithmeticError):
    """Quadrature did not reach its tolerance; ``estimate`` is the best value."""

    def __init__(self, message: str, estimate=None, error: float | None = None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error
