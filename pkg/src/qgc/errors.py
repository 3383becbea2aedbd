"""Exception types raised across the package."""


class QGCError(Exception):
    """Base class for all package errors."""


class DomainError(QGCError, ValueError):
    """An index or argument lies outside the admissible range."""


class GridTooSmallError(QGCError):
    """The quadrature grid cannot resolve the requested product exactly."""


class TruncationError(QGCError):
    """A strict-mode operation produced modes beyond the working truncation."""


class DegeneratePlaneError(QGCError):
    """The two vectors spanning a plane are (numerically) linearly dependent."""


class BlowUpError(QGCError):
    """An integrated trajectory exceeded the configured coefficient bound."""
