"""Exception types raised by the library."""


class GsqgError(Exception):
    """Base class for all library errors."""


class DegenerateCurve(GsqgError):
    """Curve's polygonal length is negligible compared to its diameter."""


class WrongParametrization(GsqgError):
    """Operation requires a constant-speed curve."""


class InvalidExponent(GsqgError):
    """Hölder exponent outside (0, 1]."""


class PointOnCurve(GsqgError):
    """Query point lies (numerically) on the curve."""


class InvalidWindow(GsqgError):
    """Arclength window outside (0, length/2]."""


class TooCloseToBoundary(GsqgError):
    """Unmollified contour quadrature requested too close to a boundary."""


class SingularEvaluation(GsqgError):
    """Unmollified kernel evaluated at the origin."""


class NotSimple(GsqgError):
    """Constructed curve self-intersects."""


class PerturbationTooLarge(GsqgError):
    """Inward perturbation magnitude exceeds its admissible ceiling."""


class OutOfHalfPlane(GsqgError):
    """Base curve leaves the closed upper half-plane."""


class ScaleTooLarge(GsqgError):
    """Mollification support wraps around the curve more than once."""


class FlowStalled(GsqgError):
    """Alignment flow failed to reach the residual target."""

    def __init__(self, message, best_residual):
        super().__init__(message)
        self.best_residual = best_residual


class MonotonicityLost(GsqgError):
    """Alignment map stopped being strictly increasing."""


class StepRejected(GsqgError):
    """Time step violates the CFL bound; caller should halve dt."""


class TopologyBreach(GsqgError):
    """A curve self-crossed after a time step; the run must stop."""


class ConfigError(GsqgError):
    """Malformed scenario configuration."""
