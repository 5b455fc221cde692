"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the requested operation.

    ``field`` names the offending input when one can be singled out; the CLI
    echoes it in its error message.
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class UnboundedNormError(ArithmeticError):
    """A norm or integral that is required to be finite is infinite."""
