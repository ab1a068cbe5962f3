"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class UnsupportedResonanceError(KeyError):
    """Resonance has no term catalog."""


class ConvergenceError(RuntimeError):
    """Iterative solver failed to reach its tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ReentryError(RuntimeError):
    """Trajectory fell below the Earth radius."""


class DivergenceError(RuntimeError):
    """Propagation produced non-finite state components."""


class SpanError(ValueError):
    """Requested window does not fit inside the data span."""


class StepSizeError(ValueError):
    """Non-positive or otherwise unusable integration step."""
