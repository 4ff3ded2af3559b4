"""
Error Types
===========

Domain errors raised across the package. All derive from ``ValueError`` so
callers can keep catching the built-in type.
"""


class RiskscopeError(ValueError):
    """Base class for every domain error."""


class InvalidParameter(RiskscopeError):
    """A numeric argument is outside its admissible range."""


class NotPositiveDefinite(RiskscopeError):
    """Cholesky factorization hit a non-positive pivot."""


class StlSyntaxError(RiskscopeError):
    """A formula string does not follow the grammar."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnboundCoordinate(RiskscopeError):
    """A formula references y[k] with k beyond the signal dimension."""


class EmptyWindow(RiskscopeError):
    """A temporal window contains no sample of the signal."""


class InvalidState(RiskscopeError):
    """A simulated position lies outside the free space."""


class DegenerateTruth(RiskscopeError):
    """A robustness level received no samples when building the truth proxy."""


class TooManyCells(RiskscopeError):
    """A grid would exceed the configured cell cap."""


class OutOfRegion(RiskscopeError):
    """An input lies outside the grid region."""


class NoConvergence(RiskscopeError):
    """An iterative solver exhausted its iteration budget."""


class AllZero(RiskscopeError):
    """A Dirichlet parameter vector sums to zero."""


class NonPositiveAlpha(RiskscopeError):
    """Sampling requires strictly positive Dirichlet parameters."""


class NonFinite(RiskscopeError):
    """A robustness value is NaN or infinite."""


class NotFittedError(RiskscopeError):
    """A model was queried before fitting."""


__all__ = [
    'RiskscopeError', 'InvalidParameter', 'NotPositiveDefinite', 'StlSyntaxError',
    'UnboundCoordinate', 'EmptyWindow', 'InvalidState', 'DegenerateTruth',
    'TooManyCells', 'OutOfRegion', 'NoConvergence', 'AllZero', 'NonPositiveAlpha',
    'NonFinite', 'NotFittedError'
]
