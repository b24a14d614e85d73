"""Exception hierarchy shared across the package."""

from __future__ import annotations


class SpinflowError(Exception):
    """Base class for all errors raised by this package."""


class GridFormatError(SpinflowError):
    """A grid document is malformed; the message names the offending field."""


class DimensionError(SpinflowError):
    """Vector/matrix dimensions do not agree."""


class JacobianSingularError(SpinflowError):
    """Newton-Raphson hit a singular Jacobian."""


class NewtonDivergedError(SpinflowError):
    """Newton-Raphson failed to converge; carries the last iterate."""

    def __init__(self, message: str, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


class SolverError(SpinflowError):
    """A minimization backend rejected its input."""
