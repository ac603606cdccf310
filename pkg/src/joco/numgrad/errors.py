class NumgradError(Exception):
    """Base class for numerical errors raised by the gradient engine."""


class NumericalOverflowError(NumgradError):
    """An operation produced a NaN or infinite value."""

    def __init__(self, message: str = "numerical overflow in graph"):
        super().__init__(message)


class NotPositiveDefiniteError(NumgradError):
    """Cholesky factorization failed even after jitter escalation."""

    def __init__(self, message: str = "not positive definite"):
        super().__init__(message)
