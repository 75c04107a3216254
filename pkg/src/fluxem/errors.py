"""Exception types raised across the package."""


class FluxEMError(Exception):
    pass


class InvalidDimension(FluxEMError, ValueError):
    pass


class InvalidLevel(FluxEMError, ValueError):
    pass


class InvalidOccupation(FluxEMError, ValueError):
    pass


class MissingSpace(FluxEMError, ValueError):
    pass


class HermiticityViolation(FluxEMError, ValueError):
    pass


class DispersiveRegimeViolation(FluxEMError, ValueError):
    pass


class FrameValidityError(FluxEMError, ValueError):
    pass


class InvalidRate(FluxEMError, ValueError):
    pass


class InvalidParameter(FluxEMError, ValueError):
    pass


class OracleSizeError(FluxEMError, ValueError):
    pass


class MissingObservable(FluxEMError, KeyError):
    pass


class HorizonTooShort(FluxEMError, ValueError):
    pass


class ConfigError(FluxEMError, ValueError):
    pass


class IntegrationDiverged(FluxEMError, RuntimeError):
    """Raised when a trajectory leaves the physical state space.

    ``time`` is the sample instant (µs) at which the violation was seen and
    ``trajectory`` holds every sample recorded up to and including it.
    """

    def __init__(self, message, time, trajectory=None):
        super().__init__(message)
        self.time = time
        self.trajectory = trajectory
