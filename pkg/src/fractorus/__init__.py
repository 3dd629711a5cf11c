"""Fractional Laplacian on the n-torus.

Submodules: ``fields`` (grids and Fourier data), ``spectral`` (exact
multipliers), ``kernels`` (heat, Riesz and Poisson kernels and constants),
``pointwise`` (singular-integral and semigroup evaluation, limit scans),
``extension`` (extension problem and trace recovery), ``regularity``
(seminorm estimators) and ``cli``.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ExtrapolationError,
    FractorusError,
    InputError,
    NumericalError,
    OffGridError,
    QuadratureError,
    ResolutionError,
    TruncationError,
)
from .fields import FourierField, GridField, GridSpec, to_fourier, to_grid  # noqa: E402
from .spectral import frac_laplacian_spectral, frac_power_spectral  # noqa: E402

__all__ = [
    "__version__",
    "ExtrapolationError", "FractorusError", "InputError", "NumericalError", "OffGridError",
    "QuadratureError", "ResolutionError", "TruncationError",
    "FourierField", "GridField", "GridSpec", "to_fourier", "to_grid",
    "frac_laplacian_spectral", "frac_power_spectral",
]
