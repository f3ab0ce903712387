"""Exception types raised across the package."""


class ConfigurationError(ValueError):
    """Invalid code, architecture or experiment configuration."""


class ResourceError(MemoryError):
    """A requested enumeration would not fit in memory."""


class NumericalError(ArithmeticError):
    """Non-finite loss or gradient encountered during training."""

    def __init__(self, message, diagnostic=None):
        super().__init__(message)
        self.diagnostic = diagnostic or {}
