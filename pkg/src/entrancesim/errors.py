"""Exception taxonomy shared across the package."""


class EntranceSimError(Exception):
    """Base class for all package errors."""


class SpecificationError(EntranceSimError, ValueError):
    """A process specification is structurally invalid or not evaluable."""


class DomainError(EntranceSimError, ValueError):
    """An argument is outside the mathematical domain of an operation."""


class PreconditionError(EntranceSimError, ValueError):
    """A documented precondition of an operation does not hold."""


class SchemaError(EntranceSimError, ValueError):
    """A configuration file does not match the documented schema."""


class NumericalOverflowError(EntranceSimError, RuntimeError):
    """A step produced a non-finite state; carries the last valid state."""

    def __init__(self, message, last_state=None, time=None):
        super().__init__(message)
        self.last_state = last_state
        self.time = time
