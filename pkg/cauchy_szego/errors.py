"""
Exception hierarchy for the Cauchy-Szegő toolkit.

Every error raised on purpose by the library derives from CauchySzegoError,
which is itself a ValueError: callers that only care about "bad input" can
keep catching ValueError.
"""

from typing import Optional


class CauchySzegoError(ValueError):
    """Base class for all library errors."""


# ============================================================================
# DOMAIN ERRORS (exit code 3 in the CLI)
# ============================================================================

class DomainError(CauchySzegoError):
    """An argument lies outside the domain of the requested function."""


class PoleError(DomainError):
    """Evaluation at a pole of a meromorphic function or Möbius map."""

    def __init__(self, message: str, point: complex):
        super().__init__(message)
        self.point = point


class OnCurveError(DomainError):
    """Singular evaluation at a point of the curve."""

    def __init__(self, message: str, point: Optional[complex] = None):
        super().__init__(message)
        self.point = point


class SideMismatchError(DomainError):
    """The point does not lie strictly on the requested side of the curve."""


class UnboundedCurveError(DomainError):
    """The operation needs a bounded curve (the wedge boundary is unbounded)."""


class UnsupportedCurveError(DomainError):
    """The curve family or parameter is not supported by the operation."""


class CapacityUnknownError(DomainError):
    """No closed form for the analytic capacity of this curve."""


# ============================================================================
# NUMERICAL ERRORS
# ============================================================================

class FrameError(CauchySzegoError):
    """An operator matrix is not expressed in the symmetrized frame."""


class ConditioningError(CauchySzegoError):
    """A linear system is too ill-conditioned to be trusted."""

    def __init__(self, message: str, condition: float):
        super().__init__(message)
        self.condition = condition


class NonConvergenceError(CauchySzegoError):
    """An iteration hit its cap; the best estimate is kept on the exception."""

    def __init__(self, message: str, estimate: float, iterations: int):
        super().__init__(message)
        self.estimate = estimate
        self.iterations = iterations


class InsufficientDataError(CauchySzegoError):
    """Too few samples for a least-squares fit."""


# ============================================================================
# INPUT PARSING (exit code 2 in the CLI)
# ============================================================================

class SpecParseError(CauchySzegoError):
    """A curve spec or complex literal could not be parsed."""
