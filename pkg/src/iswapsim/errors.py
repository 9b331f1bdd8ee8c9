"""Exception types shared across the package."""


class SimulationError(Exception):
    """Base class for all package-specific errors."""


class DimensionError(SimulationError, ValueError):
    """Operands have incompatible or non-square shapes."""


class ValidationError(SimulationError, ValueError):
    """An input violates a documented precondition."""


class NotPSDError(ValidationError):
    """Matrix has an eigenvalue below the PSD tolerance."""


class DomainError(SimulationError, ValueError):
    """Scalar argument outside the supported domain."""


class ConstraintError(SimulationError, ValueError):
    """Scheme parameters violate a compile-time constraint."""


class ModeError(SimulationError, ValueError):
    """Operation invoked with an unsupported propagation mode or segment kind."""


class ConfigurationError(SimulationError, ValueError):
    """Integrator or sweep configuration is invalid (e.g. step too coarse)."""


class ParseError(SimulationError, ValueError):
    """Config text could not be parsed; carries a 1-based line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NumericalFailureError(SimulationError, RuntimeError):
    """Propagation lost too much accuracy (re-unitarization overflow)."""
