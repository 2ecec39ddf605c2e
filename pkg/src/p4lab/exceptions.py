"""Exception types shared across the package."""


class P4LabError(Exception):
    """Base class for all package-specific errors."""


class RejectedInput(P4LabError):
    """Initial data or integration setup is invalid (non-finite field, bad span)."""


class NearZeroDenominator(P4LabError):
    """The full equation's right side was requested with |s| below the guard.

    Direct evaluation at a zero is ill-posed; callers must switch to the
    square-root representation.
    """


class OutOfRangeError(P4LabError):
    """Dense evaluation requested outside the covered t-range."""


class NotStrictlyPositive(P4LabError):
    """Square root of a trajectory that is not strictly positive."""


class InvalidInput(P4LabError):
    """Input violates a documented precondition."""


class UnsupportedMultipleZeros(P4LabError):
    """Signed square root supports exactly one isolated zero per call."""


class NoSignChange(P4LabError):
    """Bisection endpoints classify identically."""


class InconclusiveEndpoint(P4LabError):
    """A bisection endpoint classified as Undetermined."""


class CoverageError(P4LabError):
    """Classification window not covered by the trajectory and no blow-up."""


class InsufficientOscillation(P4LabError):
    """Fewer than two extrema available for an envelope."""


class BudgetExceeded(P4LabError):
    """A compute deadline expired before the operation finished."""
