"""Exception types raised across the package."""


class SgopError(Exception):
    """Base class for all library errors."""


class RangeError(SgopError, ValueError):
    """An argument lies outside its admissible range."""


class AntipodalError(SgopError, ValueError):
    """Two points are (nearly) antipodal, so no unique minimal geodesic exists."""


class BaseMismatchError(SgopError, ValueError):
    """Tangent objects living at different base points were combined."""


class DegenerateError(SgopError, ValueError):
    """A cone has empty interior or is not pointed."""


class DimensionMismatchError(SgopError, ValueError):
    pass


class PreconditionError(SgopError, ValueError):
    pass


class InfeasibleError(SgopError, ValueError):
    """The candidate point violates the constraints."""


class EmptyFeasibleRegionError(SgopError, ValueError):
    """No sampled point satisfies the constraints (and side conditions)."""


class InstanceError(SgopError, ValueError):
    """An instance document failed validation.

    ``field`` holds a dotted path to the offending entry.
    """

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class StabilityWarning(UserWarning):
    """Re-solving the scalar problem at its own solution improved the value."""
