"""Exception types shared across the library and mapped to CLI exit codes."""


class ExpgapError(Exception):
    """Base class for all library errors."""


class DomainError(ExpgapError):
    """An operation was called outside its mathematical domain."""


class UndecidedAtBudget(ExpgapError):
    """Sign decision hit the precision budget before excluding zero.

    Retryable: carries the last enclosure so the caller can resume with a
    larger budget.
    """

    def __init__(self, message, enclosure=None, precision_bits=None):
        super().__init__(message)
        self.enclosure = enclosure
        self.precision_bits = precision_bits


class ResourceCapExceeded(ExpgapError):
    """A configured resource cap (degree, enumeration size, precision) was hit."""

    def __init__(self, message, progress=None):
        super().__init__(message)
        self.progress = progress


class InsufficientCandidates(ExpgapError):
    """Pigeonhole search cannot guarantee a collision at the requested grid size."""
