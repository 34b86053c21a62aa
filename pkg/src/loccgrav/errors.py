"""Exception types raised across the package."""


class LoccGravError(Exception):
    """Base class for all package errors."""


class InvalidDimensionError(LoccGravError, ValueError):
    pass


class ShapeError(LoccGravError, ValueError):
    """Operands have incompatible subsystem dimensions."""


class TruncationError(LoccGravError, ValueError):
    """The Fock truncation loses more norm than allowed."""


class InvalidStateError(LoccGravError, ValueError):
    pass


class UnsupportedBipartitionError(LoccGravError, ValueError):
    pass


class DomainError(LoccGravError, ValueError):
    pass


class PreconditionError(LoccGravError, ValueError):
    pass


class InvalidTransformationError(LoccGravError, ValueError):
    pass


class IntegrationError(LoccGravError, RuntimeError):
    """Raised when a deterministic integrator leaves the physical state space."""

    def __init__(self, message, suggested_dt=None):
        super().__init__(message)
        self.suggested_dt = suggested_dt


class StepFailure(LoccGravError, RuntimeError):
    """A stochastic step collapsed the state norm; dt is too large."""


class ConfigError(LoccGravError, ValueError):
    pass
