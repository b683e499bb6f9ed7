"""
Numerical failure types.

Input problems are ValidationError subclasses (see validators); everything
here signals that a well-posed computation could not be carried out.
"""

from __future__ import annotations


class NumericalError(Exception):
    """Base class for numerical failures (CLI exit code 3)."""
    pass


class SingularMatrix(NumericalError):
    """Raised when an LU pivot falls below the pivot floor."""
    pass


class SingularStep(NumericalError):
    """Raised when the shifted time-step matrix cannot be factored."""
    pass


class NoConvergence(NumericalError):
    """Raised when an iteration exhausts its budget."""

    def __init__(self, message: str, shift: complex | None = None):
        super().__init__(message)
        self.shift = shift


class NearSingularShift(NumericalError):
    """Raised when a resolvent shift sits (numerically) on an eigenvalue."""
    pass


class DegenerateData(NumericalError):
    """Raised when a line fit has fewer than two distinct abscissae."""
    pass


class WindowTooSmall(NumericalError):
    """Raised when a fit window holds too few usable samples."""
    pass


class EnergyUnderflow(NumericalError):
    """Raised when energies inside a fit window underflow."""
    pass


class DegenerateDiscriminant(NumericalError):
    """Raised when the depressed cubic has a vanishing discriminant."""
    pass


class NearSingularModeSystem(NumericalError):
    """Raised when the 8x8 mode system is too ill-conditioned to trust."""

    def __init__(self, message: str, condition: float):
        super().__init__(message)
        self.condition = condition


class QuadratureFailure(NumericalError):
    """Raised when adaptive quadrature misses its tolerance."""
    pass


class UnderResolved(NumericalError):
    """Raised when a grid cannot resolve the requested frequency."""
    pass


class AsymptoticsNotConfirmed(NumericalError):
    """Raised when root deviations from their asymptotes do not shrink with w."""
    pass
