"""Exception types shared across the library.

Input/validation problems raise ValueError; everything here signals a
numerical failure encountered on structurally valid input.
"""


class NumericalError(RuntimeError):
    """Base class for numerical failures (as opposed to bad input)."""


class SingularFrameError(NumericalError):
    """A frame that should span C^n is (numerically) singular."""


class DegenerateMetricError(NumericalError):
    """Induced metric is singular or too ill-conditioned to invert."""


class QuadratureError(NumericalError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class BlowUpError(NumericalError):
    """An ODE solution left the trusted range before the requested endpoint."""

    def __init__(self, message, last_valid=None):
        super().__init__(message)
        self.last_valid = last_valid


class PositivityError(NumericalError):
    """A quantity that must be positive (metric eigenvalue, profile) is not."""
