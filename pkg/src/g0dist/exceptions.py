"""
Custom exceptions for g0dist.
"""


class G0Error(Exception):
    """Base exception for all g0dist errors."""

    pass


class ConfigurationError(G0Error):
    """Raised when there's an issue with settings, plans or presets."""

    pass


class DomainError(G0Error):
    """Raised when parameters or observations lie outside the model's domain."""

    pass


class DivergenceError(DomainError):
    """Raised when a requested moment does not exist."""

    pass


class DataFormatError(G0Error):
    """Raised when a sample, image or sidecar file cannot be read."""

    pass


class NumericalError(G0Error):
    """Base class for numerical failures (non-convergence, degenerate data)."""

    pass


class NonConvergenceError(NumericalError):
    """Raised when the optimizer hits its iteration cap or leaves finite values."""

    pass


class DegenerateSampleError(NumericalError):
    """Raised when a sample has zero variance."""

    pass


class InfeasibleFitError(NumericalError):
    """Raised when a fit lands outside the feasibility box and feasibility is required."""

    pass


class DegenerateStatisticError(NumericalError):
    """Raised when a statistic is undefined for the given estimates."""

    pass


class RowDegenerateError(NumericalError):
    """Raised when no split of an image row could be fitted."""

    pass
