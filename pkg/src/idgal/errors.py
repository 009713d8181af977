"""Exceptions shared across the library."""


class IdgalError(Exception):
    """Base class for library-specific failures."""


class PrecisionError(IdgalError):
    """A window, truncation order, or digit depth is too small to decide."""


class Inconclusive(IdgalError):
    """A bounded search ran out of ansatz or order before certifying."""


class PoleAtOrigin(IdgalError):
    """A coefficient has a pole at the expansion point."""
