"""Exception hierarchy shared by every module."""


class GloveError(Exception):
    """Base class for errors raised by this package."""


class DomainError(GloveError, ValueError):
    """Invalid quantum numbers, mismatched parities, bad arguments."""


class DimensionError(GloveError, ValueError):
    """Operands live on different spaces."""


class CapacityError(GloveError, RuntimeError):
    """A space exceeds the configured dimension cap."""
