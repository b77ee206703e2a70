"""Exception types shared across the droplet package."""


class DropletError(Exception):
    """Base class for all package-specific errors."""


class InvalidCurveError(DropletError, ValueError):
    """Marker polygon violates a curve invariant (orientation, simplicity, ...)."""


class FilletTooLargeError(DropletError, ValueError):
    """Corner fillet eats into the part of the bottom edge the run needs."""


class OutOfDomainError(DropletError, ValueError):
    """Evaluation requested outside the domain of definition."""


class InvalidLawError(DropletError, ValueError):
    """Mobility law is unusable (non-positive derivative, failed assumption)."""


class SearchFailureError(DropletError, RuntimeError):
    """A grid search found no admissible candidate."""


class IllConditionedSolveError(DropletError, RuntimeError):
    """Boundary collocation system failed its residual/conditioning checks."""


class TopologyChangeError(DropletError, RuntimeError):
    """Marker transport produced a self-intersecting curve; run must stop."""

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class ConfigError(DropletError, ValueError):
    """Run configuration failed schema validation."""
