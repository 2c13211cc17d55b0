"""Exception types raised across the package."""


class DPBanditError(Exception):
    """Base class for all package errors."""


class DesignInfeasible(DPBanditError):
    """Frank-Wolfe could not reach the requested design norm."""

    def __init__(self, achieved: float, target: float, iterations: int):
        self.achieved = achieved
        self.target = target
        self.iterations = iterations
        super().__init__(
            f"design norm {achieved:.6g} above target {target:.6g} after {iterations} iterations"
        )


class SpanMismatch(DPBanditError):
    """An action has a component outside the span of the design."""


class SingularDesign(DPBanditError):
    """The least-squares design matrix lost rank."""


class UnknownAction(DPBanditError):
    """An action does not belong to the instance's action set."""


class HorizonExceeded(DPBanditError):
    """More pulls were recorded than the horizon allows."""


class HorizonTooSmall(DPBanditError):
    """The horizon is too short to build a batch schedule."""


class ConfigError(DPBanditError):
    """Invalid experiment configuration; ``field`` names the offending key."""

    def __init__(self, field: str, message: str = ""):
        self.field = field
        super().__init__(f"{field}: {message}" if message else field)


class IoError(DPBanditError, OSError):
    """Reading or writing an output file failed; ``path`` names the file."""

    def __init__(self, path, message: str = ""):
        self.path = str(path)
        super().__init__(f"{self.path}: {message}" if message else self.path)
