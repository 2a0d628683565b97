"""Exception types shared across the package."""


class TailsimError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(TailsimError):
    """A configuration file is malformed, has unknown keys, or fails validation."""


class SingularMapping(TailsimError):
    """The inverse pressure mapping denominator is too close to zero."""


class PressureOutOfRange(TailsimError):
    """A requested pressure leaves the admissible band.

    Carries ``suggested``, the command clamped to the admissible band, so the
    caller can decide whether to accept the clamp.  Nothing is clamped
    silently.
    """

    def __init__(self, message, suggested=None):
        super().__init__(message)
        self.suggested = suggested


class SingularInertia(TailsimError):
    """The coupled platform inertia system is numerically singular."""


class NonFiniteState(TailsimError):
    """Integration produced a non-finite state.  Carries the offending time."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class NotConverged(TailsimError):
    """An iterative fit failed to converge within its iteration budget."""


class NonPositiveData(TailsimError):
    """Power-law fitting requires strictly positive abscissae and ordinates."""


class DegenerateAbscissa(TailsimError):
    """Linear fitting requires at least two distinct abscissa values."""


class NoInput(TailsimError):
    """A reporting operation received no input files."""
