"""Exception types shared across the package."""


class TofmuxError(Exception):
    """Base class for all package-specific errors."""


class InfeasibleTiming(TofmuxError):
    """Quad budget does not close: dead time would be negative.

    Carries the derived cycle counts so callers can report how far off
    the requested configuration is.
    """

    def __init__(self, message, deficit_cycles=None):
        super().__init__(message)
        self.deficit_cycles = deficit_cycles


class CapacityExceeded(TofmuxError):
    """More cameras requested than integration slots available.

    ``bound`` is the hard capacity floor(t_qt / t_qin) for the config.
    """

    def __init__(self, message, bound, requested):
        super().__init__(message)
        self.bound = bound
        self.requested = requested


class DegenerateSamples(TofmuxError):
    """Both four-bucket differences are zero; phase is undefined."""


class RateMismatch(TofmuxError):
    """Operation requires equal frame rates across cameras."""


class InsufficientFrames(TofmuxError):
    """Not enough frames for the requested extraction."""


class NoCommonValidPixels(TofmuxError):
    """No pixel is unsaturated in every frame of the stack."""


class ScenarioInvalid(TofmuxError):
    """Scenario description failed validation."""
