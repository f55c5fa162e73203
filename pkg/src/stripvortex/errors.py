"""Exception and warning types raised by stripvortex."""


class StripVortexError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgumentError(StripVortexError, ValueError):
    pass


class InvalidDiscretizationError(InvalidArgumentError):
    """Node count is odd or below the minimum of 8."""


class UnsupportedWindingError(StripVortexError, ValueError):
    """Contour wraps the cylinder a number of times other than -1, 0 or +1."""


class DegenerateContourError(StripVortexError, ValueError):
    """Two consecutive contour nodes coincide."""


class AmbiguousMembershipError(StripVortexError, ValueError):
    """Probe point lies on (or numerically on) a patch boundary."""


class KernelSingularityError(StripVortexError, ArithmeticError):
    """A kernel was evaluated at (or numerically at) a lattice point."""


class NearBoundaryError(StripVortexError, ValueError):
    """Off-boundary evaluation requested too close to a contour."""


class InvalidProbeError(StripVortexError, ValueError):
    pass


class ContourProximityError(StripVortexError):
    """Contours are about to touch or self-intersect.

    ``stage`` is set by the time integrator to the Runge-Kutta stage (1-4)
    during which the violation was detected.
    """

    def __init__(self, message, stage=None):
        super().__init__(message)
        self.stage = stage

    def __str__(self):
        msg = super().__str__()
        if self.stage is not None:
            return f"{msg} (RK stage {self.stage})"
        return msg


class RedistributionError(StripVortexError):
    """Arc-length reparameterization did not converge."""


class ConfigError(StripVortexError, ValueError):
    """Invalid simulation config. ``path`` names the offending JSON location."""

    def __init__(self, message, path=""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class ProximityWarning(UserWarning):
    """Contour separation or |gamma|_* has dropped below the warning threshold."""
