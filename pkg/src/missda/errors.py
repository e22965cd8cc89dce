"""Semantic exception hierarchy for the missda package."""


class MissdaError(Exception):
    """Base class for all missda errors."""


class DegenerateCovarianceError(MissdaError):
    """Covariance matrix is singular or fails the positive-definiteness guard."""


class UndefinedRuleError(MissdaError):
    """Discriminant coefficients define no allocation rule (zero slope vector)."""


class QuadratureError(MissdaError):
    """Quadrature failed to converge; carries the best available estimate."""

    def __init__(self, message: str, estimate: float | None = None):
        super().__init__(message)
        self.estimate = estimate


class ConditioningError(MissdaError):
    """A matrix required for inversion is singular or too ill-conditioned."""


class DataError(MissdaError):
    """Dataset violates a precondition or an input file is malformed."""
