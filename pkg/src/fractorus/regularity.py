"""Seminorm estimators for Hölder, Zygmund and semigroup-defined smoothness classes.

All values are maxima over finite grids (points, increments, times), so they
are lower bounds for the true suprema; each report records where the maximum
was attained.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .fields import GridField, to_fourier, to_grid
from .spectral import MultiplierOp, apply_multiplier, frac_laplacian_spectral, partial_derivative

DEFAULT_T_GRID = tuple(np.geomspace(1e-4, 10.0, 60))
MAX_PAIR_POINTS = 2048


@dataclass
class SeminormReport:
    kind: str
    value: float
    k_used: int
    params: dict = field(default_factory=dict)
    t_grid: list | None = None
    argmax: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.value >= 0:
            raise InputError("seminorm value must be nonnegative")

    def to_dict(self) -> dict:
        return {"kind": self.kind, "value": self.value, "k_used": self.k_used, "params": self.params,
                "t_grid": self.t_grid, "argmax": self.argmax}


def _torus_distance(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = np.abs(a[:, None, :] - b[None, :, :]) % (2 * math.pi)
    d = np.minimum(d, 2 * math.pi - d)
    return np.sqrt(np.sum(d**2, axis=-1))


def holder_seminorm(f: GridField, k: int = 0, alpha: float = 1.0, seed: int = 0) -> SeminormReport:
    """max |D^k f(x) - D^k f(y)| / |x - y|^alpha over grid pairs.

    D^k f is the vector of all k-th order partials (Frobenius norm of the
    difference). Grids with more than ``MAX_PAIR_POINTS`` points are subsampled
    with a fixed seed.
    """
    if k < 0 or int(k) != k:
        raise InputError("k must be a nonnegative integer")
    if not 0 < alpha <= 1:
        raise InputError("alpha must lie in (0, 1]")
    grid = f.grid
    F = to_fourier(f)
    orders = [o for o in itertools.product(range(k + 1), repeat=grid.dim) if sum(o) == k]
    derivs = np.stack([to_grid(partial_derivative(F, o), grid).values.ravel() for o in orders], axis=1)
    pts = np.stack([c.ravel() for c in grid.coords()], axis=1)
    idx = np.arange(grid.size)
    if grid.size > MAX_PAIR_POINTS:
        idx = np.sort(np.random.default_rng(seed).choice(grid.size, MAX_PAIR_POINTS, replace=False))
    best, where = 0.0, {}
    chunk = 512
    for start in range(0, len(idx), chunk):
        rows = idx[start:start + chunk]
        dist = _torus_distance(pts[rows], pts[idx])
        diff = np.linalg.norm(derivs[rows][:, None, :] - derivs[idx][None, :, :], axis=-1)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(dist > 0, diff / np.where(dist > 0, dist, 1.0) ** alpha, 0.0)
        i, j = np.unravel_index(np.argmax(ratio), ratio.shape)
        if ratio[i, j] > best:
            best = float(ratio[i, j])
            where = {"x": pts[rows[i]].tolist(), "y": pts[idx[j]].tolist()}
    return SeminormReport(f"holder({k},{alpha})", best, k, {"k": k, "alpha": alpha}, None, where)


def zygmund_seminorm(f: GridField) -> SeminormReport:
    """max over grid points x and grid increments h of |f(x+h) + f(x-h) - 2 f(x)| / |h|."""
    grid = f.grid
    m, h = grid.points_per_axis, grid.spacing
    vals = f.values
    best, where = 0.0, {}
    for shift in itertools.product(range(m), repeat=grid.dim):
        if not any(shift):
            continue
        rep = np.array([s if s <= m // 2 else s - m for s in shift], dtype=float) * h
        length = float(np.linalg.norm(rep))
        axes = tuple(range(grid.dim))
        second = np.roll(vals, shift, axes) + np.roll(vals, tuple(-s for s in shift), axes) - 2 * vals
        pos = np.unravel_index(np.argmax(np.abs(second)), second.shape)
        value = float(abs(second[pos])) / length
        if value > best:
            best = value
            where = {"x": grid.point(pos).tolist(), "h": rep.tolist()}
    return SeminormReport("zygmund", best, 0, {}, None, where)


def _semigroup_seminorm(f: GridField, beta: float, k: int, t_grid, kind: str, rate: float) -> SeminormReport:
    """max_t t^{k - rate beta} || d^k/dt^k S_t f ||_inf for the heat (rate 1/2) or Poisson (rate 1) semigroup."""
    t_grid = np.asarray(DEFAULT_T_GRID if t_grid is None else t_grid, dtype=float)
    if np.any(t_grid <= 0):
        raise InputError("t_grid must be positive")
    F = to_fourier(f)
    best, where = 0.0, {}
    for t in t_grid:
        op = MultiplierOp.heat_dt(t, k) if kind == "heat" else MultiplierOp.poisson1d_dt(t, k)
        vals = to_grid(apply_multiplier(F, op), f.grid).values
        pos = np.unravel_index(np.argmax(np.abs(vals)), vals.shape)
        value = float(t ** (k - rate * beta) * abs(vals[pos]))
        if value > best:
            best = value
            where = {"t": float(t), "x": f.grid.point(pos).tolist()}
    name = f"heat_lambda({beta})" if kind == "heat" else f"poisson_lambda_1d({beta})"
    return SeminormReport(name, best, k, {"beta": beta}, t_grid.tolist(), where)


def _check_beta(beta: float) -> float:
    beta = float(beta)
    if not beta > 0:
        raise InputError("beta must be positive")
    return beta


def heat_lambda_seminorm(f: GridField, beta: float, t_grid=None) -> SeminormReport:
    """Heat-semigroup seminorm with k = [beta/2] + 1."""
    beta = _check_beta(beta)
    return _semigroup_seminorm(f, beta, math.floor(beta / 2) + 1, t_grid, "heat", 0.5)


def poisson_lambda_seminorm_1d(f: GridField, beta: float, t_grid=None) -> SeminormReport:
    """Poisson-semigroup seminorm (n = 1) with k = [beta] + 1."""
    beta = _check_beta(beta)
    if f.grid.dim != 1:
        raise InputError("the Poisson seminorm is one-dimensional")
    return _semigroup_seminorm(f, beta, math.floor(beta) + 1, t_grid, "poisson", 1.0)


def equivalence_scan(f: GridField, beta: float, k: int, ell: int, t_grid=None) -> tuple[float, float]:
    """Heat seminorm of order beta computed with derivative orders k and ell."""
    beta = _check_beta(beta)
    for order in (k, ell):
        if int(order) != order or not order > beta / 2:
            raise InputError("derivative orders must be integers above beta/2")
    return (_semigroup_seminorm(f, beta, int(k), t_grid, "heat", 0.5).value,
            _semigroup_seminorm(f, beta, int(ell), t_grid, "heat", 0.5).value)


def transfer_ratio(f: GridField, sigma: float, beta: float, t_grid=None) -> float:
    """Seminorm of (-Delta)^{sigma/2} f at order beta - sigma over ||f||_inf + seminorm of f at order beta."""
    beta = _check_beta(beta)
    if not beta - sigma > 0:
        raise InputError("beta must exceed sigma")
    image = frac_laplacian_spectral(f, sigma)
    top = heat_lambda_seminorm(image, beta - sigma, t_grid).value
    bottom = f.sup_norm() + heat_lambda_seminorm(f, beta, t_grid).value
    return top / bottom if bottom > 0 else 0.0
