"""Exception types shared across the package."""


class AltzetaError(Exception):
    """Base class for every error raised by this package."""


class DomainError(AltzetaError, ValueError):
    """An argument violates a documented precondition."""


class DegenerateNodes(DomainError):
    """Interpolation/Vandermonde nodes are not pairwise distinct."""


class ZeroNode(DomainError):
    """A node is zero where a nonzero value is required."""


class ArityError(DomainError):
    """Mismatched lengths between paired sequences."""


class DegreeError(DomainError):
    """Polynomial degree is too large for the requested operation."""


class ZeroLambda(DomainError):
    """A diagonal entry is zero, so the rank-one update is undefined."""


class SingularMatrix(AltzetaError, ArithmeticError):
    """The matrix has no inverse."""


class CapExceeded(DomainError):
    """Requested size exceeds a hard cap on an exact or brute-force routine."""


class PoleError(DomainError):
    """Evaluation requested at a pole."""


class OracleUnstable(AltzetaError, ArithmeticError):
    """The reference oracle failed its internal consistency checks."""


class GridError(DomainError):
    """A grid is not strictly increasing, positive, or sufficiently separated."""


class QuadratureError(AltzetaError, ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class ContFracBreakdown(AltzetaError, ArithmeticError):
    """A continued-fraction denominator vanished.

    Attributes
    ----------
    level : int
        Index of the offending level (outermost is 1).
    """

    def __init__(self, level: int, message: str | None = None):
        self.level = level
        super().__init__(message or f"continued fraction denominator vanished at level {level}")
