"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """A parameter set is internally inconsistent or outside the supported range."""


class UsageError(ValueError):
    """An operation was called with arguments that violate its contract."""
