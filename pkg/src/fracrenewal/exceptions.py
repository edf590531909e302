"""Exception types shared by the numerical modules."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class DegenerateLawError(DomainError):
    """Pointwise evaluation requested for a law that is a point mass (beta = 1)."""


class PrecisionError(ArithmeticError):
    """Requested accuracy is not reachable; carries the best available estimate."""

    def __init__(self, message, estimate=float("nan"), bound=float("inf")):
        super().__init__(message)
        self.estimate = estimate
        self.bound = bound


class CancellationError(PrecisionError):
    """Alternating series lost too many digits; use the Laplace-inversion route."""


class ConvergenceError(ArithmeticError):
    """An iterative or series method did not converge."""

    def __init__(self, message, estimates=()):
        super().__init__(message)
        self.estimates = tuple(estimates)


class SamplingError(RuntimeError):
    """A sampler produced a non-finite or non-positive draw, or a path ran away.

    Never expected in correct operation; raised with enough context to
    reproduce the offending stream.
    """
