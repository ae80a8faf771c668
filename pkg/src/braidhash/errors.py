class BraidhashError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(BraidhashError, ValueError):
    """An argument violates a documented precondition (e.g. a non-unitary matrix)."""


class OutOfDomainError(BraidhashError, ValueError):
    """The input lies outside the domain where an operation is defined."""


class ResourceLimitError(BraidhashError):
    """A search would exceed the configured size or memory budget."""


class ConfigurationError(BraidhashError):
    """A required table or parameter is missing."""


class CorruptTableError(BraidhashError):
    """A table file failed validation on load."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index
