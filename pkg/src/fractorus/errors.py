"""Exception hierarchy.

Input problems derive from ``ValueError``; numerical problems (truncation,
quadrature, extrapolation) derive from ``NumericalError`` so callers such as
the CLI can map them to distinct exit codes.
"""

from __future__ import annotations


class FractorusError(Exception):
    """Base class for all library errors."""


class InputError(FractorusError, ValueError):
    """Invalid argument, shape, or configuration."""


class OffGridError(InputError):
    """A point that must lie on the grid does not."""


class NumericalError(FractorusError, ArithmeticError):
    """A numerical procedure could not meet its tolerance."""


class TruncationError(NumericalError):
    """A series truncation radius is too small for the requested tolerance."""


class QuadratureError(NumericalError):
    """Adaptive quadrature did not converge."""


class ResolutionError(NumericalError):
    """Estimated discretization error exceeds the requested tolerance."""


class ExtrapolationError(NumericalError):
    """Limit extrapolation did not converge.

    The sequence of values that was being extrapolated is kept on
    ``self.sequence`` for auditing.
    """

    def __init__(self, message: str, sequence=None):
        super().__init__(message)
        self.sequence = sequence
