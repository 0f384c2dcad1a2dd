"""Exception hierarchy.

Hypothesis/guard violations (``GuardError`` subclasses) are kept apart from
plain numerical failures so that the CLI can map them to a distinct exit code.
"""


class PolykernError(Exception):
    """Base class for all package errors."""


class DimensionError(PolykernError, ValueError):
    """Multi-indices or points of mismatched length."""


class DomainError(PolykernError, ValueError):
    """Argument outside the domain of a function (e.g. a negative multi-index)."""


class SingularityError(PolykernError, ZeroDivisionError):
    pass


class GeometryError(PolykernError, ValueError):
    """A quadrature poly-circle leaves the domain of holomorphy."""


class ContinuationError(PolykernError, RuntimeError):
    """Angle jump too large while tracking a lifted rotation; retry with more steps."""


class GuardError(PolykernError):
    """A hypothesis required by a construction does not hold."""


class NoWitnessError(GuardError, ValueError):
    pass


class WitnessSearchError(GuardError, RuntimeError):
    pass


class IncomparableError(GuardError, ValueError):
    pass


class ConfigError(PolykernError, ValueError):
    """Invalid run configuration; ``path`` names the offending field."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")
