"""Exception types shared across the package."""


class RundynError(Exception):
    """Base class for all package errors."""


class DimensionError(RundynError, ValueError):
    """Operands have incompatible shapes."""


class InvariantError(RundynError, ValueError):
    """An input violates a structural invariant (Hermiticity, unit trace, unitarity, ...)."""


class CapacityError(RundynError, RuntimeError):
    """A dense computation would exceed the configured size limit."""


class ConfigError(RundynError, ValueError):
    """An experiment configuration is malformed."""
