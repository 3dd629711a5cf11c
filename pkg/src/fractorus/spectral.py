"""Exact Fourier-multiplier operators on the torus.

These are diagonal in the mode basis, hence exact on trigonometric
polynomials, and serve as the reference every other route is tested against.

Note the two power conventions: ``frac_laplacian(sigma)`` has symbol
``|nu|^sigma`` while ``frac_power(gamma)`` has symbol ``|nu|^(2 gamma)``, i.e.
``(-Delta)^(sigma/2) == frac_power(sigma/2)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InputError
from .fields import FourierField, GridField, evaluate, power_of_norm2, to_fourier, to_grid

_KINDS = ("frac_laplacian", "frac_power", "heat", "heat_dt", "poisson1d", "poisson1d_dt")


@dataclass(frozen=True)
class MultiplierOp:
    """A diagonal operator identified by ``kind`` and its scalar parameters."""

    kind: str
    sigma: float | None = None
    gamma: float | None = None
    t: float | None = None
    k: int = 0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise InputError(f"unknown multiplier kind {self.kind!r}")
        if self.kind == "frac_laplacian":
            if self.sigma is None or not 0 < self.sigma < 2:
                raise InputError("frac_laplacian needs 0 < sigma < 2")
        elif self.kind == "frac_power":
            if self.gamma is None or not self.gamma > 0:
                raise InputError("frac_power needs gamma > 0")
        else:
            if self.t is None or not self.t > 0:
                raise InputError(f"{self.kind} needs t > 0")
            if self.kind.endswith("_dt") and self.k < 1:
                raise InputError(f"{self.kind} needs k >= 1")

    @classmethod
    def frac_laplacian(cls, sigma: float) -> "MultiplierOp":
        return cls("frac_laplacian", sigma=float(sigma))

    @classmethod
    def frac_power(cls, gamma: float) -> "MultiplierOp":
        return cls("frac_power", gamma=float(gamma))

    @classmethod
    def heat(cls, t: float) -> "MultiplierOp":
        return cls("heat", t=float(t))

    @classmethod
    def heat_dt(cls, t: float, k: int) -> "MultiplierOp":
        return cls("heat_dt", t=float(t), k=int(k))

    @classmethod
    def poisson1d(cls, t: float) -> "MultiplierOp":
        return cls("poisson1d", t=float(t))

    @classmethod
    def poisson1d_dt(cls, t: float, k: int) -> "MultiplierOp":
        return cls("poisson1d_dt", t=float(t), k=int(k))

    @property
    def one_dimensional(self) -> bool:
        return self.kind.startswith("poisson")

    def symbol(self, norm2: np.ndarray) -> np.ndarray:
        """Multiplier values as a function of |nu|^2."""
        norm2 = np.asarray(norm2, dtype=float)
        if self.kind == "frac_laplacian":
            return power_of_norm2(norm2, self.sigma / 2)
        if self.kind == "frac_power":
            return power_of_norm2(norm2, self.gamma)
        if self.kind == "heat":
            return np.exp(-self.t * norm2)
        if self.kind == "heat_dt":
            return (-norm2) ** self.k * np.exp(-self.t * norm2)
        absk = np.sqrt(norm2)
        if self.kind == "poisson1d":
            return np.exp(-self.t * absk)
        return (-absk) ** self.k * np.exp(-self.t * absk)


def apply_multiplier(F: FourierField, op: MultiplierOp) -> FourierField:
    if op.one_dimensional and F.dim != 1:
        raise InputError("Poisson multipliers are defined in one dimension only")
    return F.with_coeffs(F.coeffs * op.symbol(F.norm2()))


def apply_to_grid(f: GridField, op: MultiplierOp) -> GridField:
    return to_grid(apply_multiplier(to_fourier(f), op), f.grid)


def frac_laplacian_spectral(f: GridField, sigma: float) -> GridField:
    """(-Delta)^{sigma/2} f via the multiplier |nu|^sigma."""
    return apply_to_grid(f, MultiplierOp.frac_laplacian(sigma))


def frac_power_spectral(f: GridField, gamma: float) -> GridField:
    """(-Delta)^gamma f via the multiplier |nu|^{2 gamma}."""
    return apply_to_grid(f, MultiplierOp.frac_power(gamma))


def heat_semigroup(f: GridField, t: float) -> GridField:
    if t < 0:
        raise InputError("heat semigroup needs t >= 0")
    if t == 0:
        return f
    return apply_to_grid(f, MultiplierOp.heat(t))


def heat_time_derivative(f: GridField, t: float, k: int) -> GridField:
    """k-th t-derivative of the heat semigroup applied to f."""
    return apply_to_grid(f, MultiplierOp.heat_dt(t, k))


def poisson_semigroup_1d(f: GridField, t: float) -> GridField:
    if f.grid.dim != 1:
        raise InputError("Poisson semigroup is implemented in one dimension only")
    if t < 0:
        raise InputError("Poisson semigroup needs t >= 0")
    if t == 0:
        return f
    return apply_to_grid(f, MultiplierOp.poisson1d(t))


def poisson_time_derivative_1d(f: GridField, t: float, k: int) -> GridField:
    if f.grid.dim != 1:
        raise InputError("Poisson semigroup is implemented in one dimension only")
    return apply_to_grid(f, MultiplierOp.poisson1d_dt(t, k))


def partial_derivative(F: FourierField, orders: Sequence[int]) -> FourierField:
    """Mixed partial derivative with the given order along each axis."""
    if len(orders) != F.dim:
        raise InputError("one derivative order per axis is required")
    factor = np.ones(F.coeffs.shape, dtype=complex)
    for k, o in zip(F.wave_vectors(), orders):
        if o:
            factor = factor * (1j * k) ** int(o)
    return F.with_coeffs(F.coeffs * factor)


def laplacian(F: FourierField) -> FourierField:
    return F.with_coeffs(-F.norm2() * F.coeffs)


def gradient_at(F: FourierField, index: Sequence[int], grid) -> np.ndarray:
    """Spectral gradient of F evaluated at one grid point."""
    x = grid.point(index)[None, :]
    out = []
    for axis in range(F.dim):
        orders = [0] * F.dim
        orders[axis] = 1
        out.append(float(evaluate(partial_derivative(F, orders), x)[0]))
    return np.array(out)
