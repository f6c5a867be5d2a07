"""Exception types raised across the package."""


class FhrChaosError(Exception):
    """Base class for all package errors."""


class ConfigError(FhrChaosError):
    """Invalid configuration value or file."""


class DivergenceError(FhrChaosError):
    """State norm exceeded the configured bound during integration."""

    def __init__(self, t: float, norm: float):
        self.t = t
        self.norm = norm
        super().__init__(f"state norm {norm:.3e} exceeded divergence bound at t={t:.6g}")


class StepUnderflowError(FhrChaosError):
    """Adaptive step size fell below the minimum allowed step."""

    def __init__(self, t: float, step: float):
        self.t = t
        self.step = step
        super().__init__(f"adaptive step underflow ({step:.3e}) at t={t:.6g}")


class TooFewCrossingsError(FhrChaosError):
    """Not enough section crossings for the requested operation."""


class UnknownLabelError(FhrChaosError):
    """Referenced region label does not exist in the partition."""


class TooFewRegionsError(FhrChaosError):
    """Partition edit would leave fewer than two regions."""


class LostInBackgroundError(FhrChaosError):
    """Trajectory stayed outside all regions longer than the allowed timeout."""


class ZeroRowError(FhrChaosError):
    """A state in the alphabet has no outgoing transitions."""


class NotIrreducibleError(FhrChaosError):
    """Chain is not irreducible; stationary distribution is not unique."""


class NoCycleError(FhrChaosError):
    """Support graph has no cycle; subshift entropy is undefined."""


class NotConvergedError(FhrChaosError):
    """Iterative estimate failed to converge."""


class InsufficientDataError(FhrChaosError):
    """Sequence too short for the requested estimate."""


class IncompleteReductionError(FhrChaosError):
    """Binary reduction map does not cover the alphabet or maps outside {0, 1}."""


class NoCandidateError(FhrChaosError):
    """No region split scored above the acceptance floor."""


class MismatchedParametersError(FhrChaosError):
    """Refinement comparison requires reports at the same parameter value."""


class MissingMeasureError(FhrChaosError):
    """Sweep rows lack a measure required by this operation."""
