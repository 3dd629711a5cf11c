"""Periodic fields on the n-torus and conversions between sample and mode form.

Grid convention: along every axis the M sample points are
``x_j = -pi + (j + 1) * 2*pi/M`` for ``j = 0..M-1``, so the grid covers the
half-open cube (-pi, pi]^n and the last point of each axis is ``pi``.
Sample arrays are stored with shape ``(M,) * n`` in row-major (C) order.

Fourier coefficients are normalized so that

    c_nu = M^{-n} * sum_j f(x_j) exp(-i nu . x_j),

which equals (2 pi)^{-n} times the integral of f e^{-i nu x} for band-limited
f. A grid of size M carries the symmetric mode cube |nu_i| <= M/2. The
Nyquist coefficient (|nu_i| = M/2) is split evenly between +M/2 and -M/2,
which keeps real fields Hermitian and makes the trigonometric interpolant
real and even-symmetric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InputError, OffGridError

MAX_DIM = 3


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid with ``points_per_axis`` samples along ``dim`` axes."""

    dim: int
    points_per_axis: int

    def __post_init__(self):
        if not isinstance(self.dim, (int, np.integer)) or not 1 <= self.dim <= MAX_DIM:
            raise InputError(f"dim must be 1, 2 or 3, got {self.dim!r}")
        m = self.points_per_axis
        if not isinstance(m, (int, np.integer)) or m < 4 or m % 2:
            raise InputError(f"points_per_axis must be an even integer >= 4, got {m!r}")
        if m ** self.dim > np.iinfo(np.intp).max:
            raise InputError("grid too large for the platform index type")

    @property
    def spacing(self) -> float:
        return 2.0 * math.pi / self.points_per_axis

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points_per_axis,) * self.dim

    @property
    def size(self) -> int:
        return self.points_per_axis ** self.dim

    @property
    def mode_radius(self) -> int:
        return self.points_per_axis // 2

    def axis_coords(self) -> np.ndarray:
        m = self.points_per_axis
        return -math.pi + (np.arange(m) + 1) * self.spacing

    def coords(self) -> tuple[np.ndarray, ...]:
        """Coordinate arrays of shape ``self.shape``, one per axis."""
        axis = self.axis_coords()
        return tuple(np.meshgrid(*([axis] * self.dim), indexing="ij"))

    def point(self, index: Sequence[int]) -> np.ndarray:
        index = self._check_index(index)
        return -math.pi + (np.asarray(index, dtype=float) + 1) * self.spacing

    def index_of(self, point: Sequence[float], atol: float = 1e-9) -> tuple[int, ...]:
        """Grid index of a coordinate point, wrapping into (-pi, pi]."""
        point = np.atleast_1d(np.asarray(point, dtype=float))
        if point.shape != (self.dim,):
            raise InputError(f"point must have {self.dim} coordinates")
        raw = (point + math.pi) / self.spacing - 1.0
        nearest = np.rint(raw)
        if np.any(np.abs(raw - nearest) * self.spacing > atol):
            raise OffGridError(f"point {point.tolist()} is not a grid point")
        return tuple(int(v) % self.points_per_axis for v in nearest)

    def resolve(self, x) -> tuple[int, ...]:
        """Accept either an integer index tuple or a coordinate point."""
        arr = np.atleast_1d(np.asarray(x))
        if np.issubdtype(arr.dtype, np.integer):
            return self._check_index(arr.tolist())
        return self.index_of(arr)

    def _check_index(self, index) -> tuple[int, ...]:
        index = tuple(int(i) for i in np.atleast_1d(index))
        if len(index) != self.dim or any(not 0 <= i < self.points_per_axis for i in index):
            raise OffGridError(f"index {index} outside grid of shape {self.shape}")
        return index


@dataclass(frozen=True)
class GridField:
    """Real samples of a periodic function on a :class:`GridSpec`."""

    grid: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values)
        if np.iscomplexobj(vals):
            raise InputError("grid fields are real-valued")
        vals = np.array(vals, dtype=float)
        if vals.size != self.grid.size:
            raise InputError(f"expected {self.grid.size} samples, got {vals.size}")
        vals = vals.reshape(self.grid.shape)
        if not np.all(np.isfinite(vals)):
            raise InputError("grid field contains non-finite samples")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, grid: GridSpec, func) -> "GridField":
        """Sample ``func(*coords)`` on the grid."""
        return cls(grid, np.broadcast_to(func(*grid.coords()), grid.shape))

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def __add__(self, other: "GridField") -> "GridField":
        _same_grid(self, other)
        return GridField(self.grid, self.values + other.values)

    def __sub__(self, other: "GridField") -> "GridField":
        _same_grid(self, other)
        return GridField(self.grid, self.values - other.values)

    def __mul__(self, scalar: float) -> "GridField":
        return GridField(self.grid, self.values * float(scalar))

    __rmul__ = __mul__


def _same_grid(a: GridField, b: GridField) -> None:
    if a.grid != b.grid:
        raise InputError("fields live on different grids")


@dataclass(frozen=True)
class FourierField:
    """Fourier coefficients on the mode cube |nu_i| <= mode_radius.

    ``coeffs[nu_1 + N, ..., nu_n + N]`` holds ``c_nu``.
    """

    dim: int
    mode_radius: int
    coeffs: np.ndarray = field(repr=False)
    real: bool = True

    def __post_init__(self):
        if not 1 <= self.dim <= MAX_DIM:
            raise InputError(f"dim must be 1, 2 or 3, got {self.dim}")
        if self.mode_radius < 0:
            raise InputError("mode_radius must be nonnegative")
        c = np.array(self.coeffs, dtype=complex)
        width = 2 * self.mode_radius + 1
        if c.shape != (width,) * self.dim:
            raise InputError(f"coeffs must have shape {(width,) * self.dim}, got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise InputError("Fourier coefficients contain non-finite values")
        if self.real:
            mirror = np.conj(np.flip(c))
            scale = max(1.0, float(np.max(np.abs(c))))
            if np.max(np.abs(c - mirror)) > 1e-10 * scale:
                raise InputError("coefficients flagged real violate Hermitian symmetry")
            c = 0.5 * (c + mirror)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def modes(self) -> np.ndarray:
        """Integer modes along one axis, ``-N..N``."""
        return np.arange(-self.mode_radius, self.mode_radius + 1)

    def wave_vectors(self) -> tuple[np.ndarray, ...]:
        """Broadcastable mode arrays, one per axis."""
        return tuple(np.meshgrid(*([self.modes()] * self.dim), indexing="ij"))

    def norm2(self) -> np.ndarray:
        """|nu|^2 on the mode cube."""
        return sum(k.astype(float) ** 2 for k in self.wave_vectors())

    def coefficient(self, nu: Sequence[int]) -> complex:
        nu = tuple(int(v) for v in np.atleast_1d(nu))
        if len(nu) != self.dim or any(abs(v) > self.mode_radius for v in nu):
            return 0j
        return complex(self.coeffs[tuple(v + self.mode_radius for v in nu)])

    def with_coeffs(self, coeffs: np.ndarray, real: bool | None = None) -> "FourierField":
        return FourierField(self.dim, self.mode_radius, coeffs, self.real if real is None else real)

    @classmethod
    def from_modes(cls, dim: int, mode_radius: int, entries: dict, real: bool = True) -> "FourierField":
        """Build from a ``{nu: c_nu}`` mapping; unspecified modes are zero."""
        c = np.zeros((2 * mode_radius + 1,) * dim, dtype=complex)
        for nu, val in entries.items():
            nu = tuple(np.atleast_1d(nu))
            c[tuple(int(v) + mode_radius for v in nu)] = val
        return cls(dim, mode_radius, c, real)


def _axis_phase(m: int, modes: np.ndarray) -> np.ndarray:
    # exp(-i nu x_0) with x_0 = -pi + h, the first sample on each axis
    return np.exp(-1j * modes * (-math.pi + 2.0 * math.pi / m))


def to_fourier(f: GridField) -> FourierField:
    """Normalized DFT of a grid field onto the mode cube of radius M/2."""
    grid = f.grid
    m, n = grid.points_per_axis, grid.dim
    raw = np.fft.fftshift(np.fft.fftn(f.values)) / grid.size
    modes = np.arange(-m // 2, m // 2)
    phase = _axis_phase(m, modes)
    for axis in range(n):
        shape = [1] * n
        shape[axis] = m
        raw = raw * phase.reshape(shape)
    # extend each axis by the +M/2 slot and split the Nyquist coefficient
    for axis in range(n):
        nyq = np.take(raw, [0], axis=axis) * 0.5
        rest = np.take(raw, range(1, m), axis=axis)
        raw = np.concatenate([nyq, rest, nyq], axis=axis)
    return FourierField(n, m // 2, raw, real=True)


def to_grid(F: FourierField, grid: GridSpec | None = None) -> GridField:
    """Evaluate the trigonometric polynomial ``F`` on a grid (default M = 2N)."""
    if grid is None:
        grid = GridSpec(F.dim, max(4, 2 * F.mode_radius))
    if grid.dim != F.dim:
        raise InputError("dimension mismatch between field and grid")
    m, n, big_n = grid.points_per_axis, grid.dim, F.mode_radius
    if big_n > m // 2:
        raise InputError(f"mode radius {big_n} exceeds the grid's {m // 2}")
    c = np.asarray(F.coeffs)
    pad = m // 2 - big_n
    if pad:
        c = np.pad(c, [(pad, pad)] * n)
    # fold +M/2 onto -M/2: the two exponentials coincide on the grid
    for axis in range(n):
        first = np.take(c, [0], axis=axis) + np.take(c, [m], axis=axis)
        c = np.concatenate([first, np.take(c, range(1, m), axis=axis)], axis=axis)
    modes = np.arange(-m // 2, m // 2)
    phase = np.conj(_axis_phase(m, modes))
    for axis in range(n):
        shape = [1] * n
        shape[axis] = m
        c = c * phase.reshape(shape)
    vals = np.fft.ifftn(np.fft.ifftshift(c)) * grid.size
    if F.real:
        vals = vals.real
    elif np.max(np.abs(vals.imag)) > 1e-10 * max(1.0, np.max(np.abs(vals))):
        raise InputError("field is complex-valued; grid fields must be real")
    else:
        vals = vals.real
    return GridField(grid, vals)


def evaluate(F: FourierField, points: np.ndarray) -> np.ndarray:
    """Evaluate the trigonometric interpolant at arbitrary points.

    ``points`` has shape ``(P, n)`` (or ``(P,)`` when n = 1). Returns real
    values for real fields, complex otherwise.
    """
    pts = np.asarray(points, dtype=float)
    if F.dim == 1 and pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[1] != F.dim:
        raise InputError(f"points must have shape (P, {F.dim})")
    modes = F.modes()
    exps = [np.exp(1j * np.outer(pts[:, a], modes)) for a in range(F.dim)]
    c = F.coeffs
    if F.dim == 1:
        out = exps[0] @ c
    elif F.dim == 2:
        out = np.einsum("pa,pa->p", exps[0], exps[1] @ c.T)
    else:
        tmp = np.einsum("abc,pc->pab", c, exps[2])
        out = np.einsum("pa,pb,pab->p", exps[0], exps[1], tmp)
    return out.real if F.real else out


def mean(f: GridField) -> float:
    """Grid average, i.e. (2 pi)^{-n} times the integral over the cube."""
    return float(np.mean(f.values))


def sobolev_norm(F: FourierField, s: float) -> float:
    """(sum_nu |nu|^{2s} |c_nu|^2)^{1/2} with 0^{2s} = 0 for s > 0 and 1 for s = 0."""
    if not np.isfinite(s) or s < 0:
        raise InputError("s must be finite and nonnegative")
    weights = power_of_norm2(F.norm2(), s)
    return float(np.sqrt(np.sum(weights * np.abs(F.coeffs) ** 2)))


def l2_norm(F: FourierField) -> float:
    """L^2 norm over the fundamental cube: (2 pi)^{n/2} (sum |c_nu|^2)^{1/2}."""
    return float((2 * math.pi) ** (F.dim / 2) * np.sqrt(np.sum(np.abs(F.coeffs) ** 2)))


def power_of_norm2(norm2: np.ndarray, exponent: float) -> np.ndarray:
    """(|nu|^2)^exponent with the zero mode mapped to 0 (or 1 when exponent = 0)."""
    norm2 = np.asarray(norm2, dtype=float)
    if exponent == 0:
        return np.ones_like(norm2)
    out = np.zeros_like(norm2)
    pos = norm2 > 0
    out[pos] = norm2[pos] ** exponent
    return out
