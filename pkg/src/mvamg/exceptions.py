"""Exception types raised across the package."""


class AmgError(Exception):
    """Base class for solver-specific failures."""


class NotSpdError(AmgError):
    """An operator violated a symmetric-positive-definite requirement.

    Raised for negative quadratic forms, zero diagonal entries, and
    Krylov breakdowns (p'Ap <= 0 or r'z <= 0).
    """


class CoarseningStagnationError(AmgError):
    """Matching produced no pairs at the finest level of a hierarchy."""

    def __init__(self, message, level=0):
        super().__init__(message)
        self.level = level


class SvdConvergenceError(AmgError):
    """One-sided Jacobi SVD hit its sweep cap before converging."""

    def __init__(self, message, aggregate_id=None):
        super().__init__(message)
        self.aggregate_id = aggregate_id


class MatrixMarketError(AmgError):
    """Malformed Matrix Market input."""
