"""Pointwise evaluation of the fractional Laplacian by singular integrals and
by semigroup time integrals, and the sigma -> 0 / sigma -> 2 limit scans.

Singular-integral route
-----------------------
For x on the grid,

    (-Delta)^{sigma/2} f(x) = int_{Q_n} (f(x) - f(x - z) - [sigma >= 1] grad f(x).z) K(z) dz

with K the periodized Riesz kernel. The ball |z| < delta is replaced by
its Taylor expansion: against the (cubic-symmetric) kernel only the even
terms survive, giving

    -(Delta f(x) / 2n) A_2 - (Delta^2 f(x) / 8n(n+2)) A_4,   A_m = int_{|z|<delta} |z|^m K,

(second term only for ``taylor_order = 2``); derivatives are spectral. The
first omitted Taylor term is bounded and reported as the error budget.

Outside the ball: in 1D, composite Gauss-Legendre on [delta, pi] for +z and
-z. In 2D/3D the integrand is split by a smooth radial cutoff chi: the part
``chi * integrand`` is integrated in polar coordinates (graded Gauss-Legendre
in r, trapezoid / Gauss in the angles) and ``(1 - chi) * integrand``, which
is smooth and periodic, by the trapezoid rule on a shifted Cartesian grid.
In 3D the kernel at the nodes is the explicit |z|^{-3-sigma} term plus a
Chebyshev interpolant of the smooth remainder.

Values of f between grid points come from the trigonometric interpolant.
Because the quadrature rule does not depend on x, evaluating it at every grid
point is the same as weighting each Fourier mode by
``sum_q w_q K(z_q) (1 - cos(nu . z_q))``; the ``*_field`` functions use that
form, and ``frac_lap_pointwise`` evaluates one point literally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy import integrate, special

from . import kernels
from .errors import InputError, QuadratureError, ResolutionError
from .fields import FourierField, GridField, evaluate, mean, to_fourier, to_grid
from .kernels import DEFAULT_CONFIG, KernelConfig
from .spectral import laplacian, partial_derivative


@dataclass(frozen=True)
class PVConfig:
    """Discretization of the principal-value integral.

    ``delta=None`` picks the largest radius up to a quarter grid spacing whose
    Taylor-remainder bound stays below ``tol / 10`` for the field at hand.
    """

    delta: float | None = None
    taylor_order: int = 2
    tol: float = 1e-6
    panel_nodes: int = 16
    cutoff_center: float | None = None
    cutoff_width: float = 0.25
    kernel: KernelConfig = field(default=DEFAULT_CONFIG)

    def __post_init__(self):
        if self.delta is not None and not 0 < self.delta < math.pi / 2:
            raise InputError("delta must lie in (0, pi/2)")
        if self.taylor_order not in (1, 2):
            raise InputError("taylor_order must be 1 or 2")
        if not self.tol >= 1e-12:
            raise InputError("tol must be >= 1e-12")


@dataclass(frozen=True)
class ErrorBudget:
    delta: float
    taylor_remainder: float
    ball_correction: float


@dataclass
class LimitScanReport:
    sigmas: list
    sup_errors: list
    target: str

    def __post_init__(self):
        if len(self.sigmas) != len(self.sup_errors):
            raise InputError("sigmas and sup_errors differ in length")
        diffs = np.diff(self.sigmas)
        if len(diffs) and not (np.all(diffs > 0) or np.all(diffs < 0)):
            raise InputError("sigmas must be strictly monotone")

    @property
    def endpoint(self) -> float:
        return 0.0 if self.target == "zero_limit" else 2.0

    def monotone_toward_endpoint(self) -> bool:
        """Errors shrink strictly as sigma approaches the endpoint, on each side of it."""
        s = np.asarray(self.sigmas, dtype=float)
        e = np.asarray(self.sup_errors, dtype=float)
        for side in (s < self.endpoint, s > self.endpoint):
            if side.sum() < 2:
                continue
            seq = e[side][np.argsort(-np.abs(s[side] - self.endpoint))]
            # an exactly vanishing error may stay at zero
            if np.any((seq[1:] >= seq[:-1]) & ~((seq[1:] == 0) & (seq[:-1] == 0))):
                return False
        return True

    def to_dict(self) -> dict:
        return {"target": self.target, "sigmas": list(map(float, self.sigmas)),
                "sup_errors": list(map(float, self.sup_errors))}

    def to_rows(self) -> list[dict]:
        return [{"sigma": float(s), "sup_error": float(e)} for s, e in zip(self.sigmas, self.sup_errors)]


# ---------------------------------------------------------------- quadrature rule


def _sphere_area(n: int) -> float:
    return 2 * math.pi ** (n / 2) / special.gamma(n / 2)


def _cutoff(r: np.ndarray, center: float, width: float) -> np.ndarray:
    return 0.5 * special.erfc((r - center) / width)


def _radial_panels(lo: float, hi: float, max_len: float) -> np.ndarray:
    edges = [lo]
    while edges[-1] < hi:
        step = min(edges[-1], max_len)
        edges.append(min(edges[-1] + step, hi))
    return np.array(edges)


def _composite_gl(edges: np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray]:
    gx, gw = np.polynomial.legendre.leggauss(order)
    a, b = edges[:-1, None], edges[1:, None]
    nodes = 0.5 * (a + b) + 0.5 * (b - a) * gx
    weights = 0.5 * (b - a) * gw
    return nodes.ravel(), weights.ravel()


@dataclass(frozen=True)
class SingularRule:
    """Nodes z_q and weights w_q K(z_q) for the integral outside the ball."""

    nodes: np.ndarray
    weights: np.ndarray
    delta: float
    ball_moments: dict  # m -> int_{|z|<delta} |z|^m K(z) dz


@lru_cache(maxsize=64)
def _singular_rule(n: int, sigma: float, m: int, delta: float, cfg: PVConfig, prefactor: float) -> SingularRule:
    # ``prefactor`` is part of the cache key so that a changed kernel constant
    # never reuses stale kernel values
    kcfg = cfg.kernel
    max_freq = (m // 2) * math.sqrt(n)
    max_len = min(0.25, 2.5 / max(max_freq, 1.0)) if n < 3 else min(0.5, 5.0 / max(max_freq, 1.0))
    if n == 1:
        r, w = _composite_gl(_radial_panels(delta, math.pi, max_len), cfg.panel_nodes)
        nodes = np.concatenate([r, -r])[:, None]
        weights = np.concatenate([w, w])
    else:
        center = cfg.cutoff_center if cfg.cutoff_center is not None else delta + 5.8 * cfg.cutoff_width
        r_max = center + 6.0 * cfg.cutoff_width
        if r_max >= math.pi:
            raise InputError("cutoff does not fit inside the fundamental cube; reduce cutoff_width")
        r, wr = _composite_gl(_radial_panels(delta, r_max, max_len), cfg.panel_nodes)
        wr = wr * r ** (n - 1) * _cutoff(r, center, cfg.cutoff_width)
        n_ang = 2 * math.ceil(r_max * max_freq) + 32 if n == 2 else math.ceil(r_max * max_freq) + 24
        phi = 2 * math.pi * np.arange(n_ang) / n_ang
        if n == 2:
            dirs = np.stack([np.cos(phi), np.sin(phi)], axis=1)
            wdir = np.full(n_ang, 2 * math.pi / n_ang)
        else:
            ct, wct = np.polynomial.legendre.leggauss(n_ang // 2)
            st = np.sqrt(1 - ct**2)
            dirs = np.stack([np.outer(st, np.cos(phi)).ravel(), np.outer(st, np.sin(phi)).ravel(),
                             np.repeat(ct, n_ang)], axis=1)
            wdir = np.outer(wct, np.full(n_ang, 2 * math.pi / n_ang)).ravel()
        polar_nodes = (r[:, None, None] * dirs[None, :, :]).reshape(-1, n)
        polar_w = (wr[:, None] * wdir[None, :]).ravel()
        p = 2 * m + 32
        h = 2 * math.pi / p
        axis = -math.pi + (np.arange(p) + 0.5) * h
        mesh = np.stack([a.ravel() for a in np.meshgrid(*([axis] * n), indexing="ij")], axis=1)
        rad = np.linalg.norm(mesh, axis=1)
        outer = 1.0 - _cutoff(rad, center, cfg.cutoff_width)
        keep = (rad > delta) & (outer > 1e-18)
        nodes = np.concatenate([polar_nodes, mesh[keep]])
        weights = np.concatenate([polar_w, outer[keep] * h**n])
    if n < 3:
        kvals = kernels.riesz_kernel(nodes if n > 1 else nodes[:, 0], sigma, n, kcfg)
    else:
        # direct lattice sums are too slow at this node count
        smooth = kernels.RegularPartInterpolant(sigma, n, kcfg)
        kvals = prefactor * np.linalg.norm(nodes, axis=1) ** (-n - sigma) + smooth(nodes)
    regular = kernels.riesz_kernel_regular_part_at_zero(sigma, n, kcfg)
    area = _sphere_area(n)
    moments = {
        k: prefactor * area * delta ** (k - sigma) / (k - sigma) + regular * area * delta ** (n + k) / (n + k)
        for k in (2, 4, 6)
    }
    nodes.setflags(write=False)
    w = weights * kvals
    w.setflags(write=False)
    return SingularRule(nodes, w, delta, moments)


def _taylor_coeffs(n: int) -> tuple[float, float]:
    # even Taylor terms of 1 - cos(nu.z) averaged over directions:
    # |nu|^2 |z|^2 / (2n)  and  -3 |nu|^4 |z|^4 / (24 n (n+2))
    return 1.0 / (2 * n), 3.0 / (24 * n * (n + 2))


def _remainder_bound(F: FourierField, moments: dict, order: int) -> float:
    k = 4 if order == 1 else 6
    weight = float(np.sum(np.abs(F.coeffs) * F.norm2() ** (k / 2)))
    return weight * moments[k] / math.factorial(k)


def _choose_delta(F: FourierField, sigma: float, spacing: float, cfg: PVConfig) -> float:
    if cfg.delta is not None:
        return cfg.delta
    n = F.dim
    k = 4 if cfg.taylor_order == 1 else 6
    weight = float(np.sum(np.abs(F.coeffs) * F.norm2() ** (k / 2)))
    delta = 0.25 * spacing
    if weight == 0:
        return delta
    const = kernels.riesz_prefactor(sigma, n).value * _sphere_area(n) / (k - sigma) / math.factorial(k)
    limit = (0.1 * cfg.tol / (weight * const)) ** (1.0 / (k - sigma))
    # keep delta on a coarse geometric ladder so the rule cache is reused
    if limit < delta:
        delta = delta * 2.0 ** math.floor(math.log2(limit / delta))
    return delta


def _prepare(f: GridField, sigma: float, cfg: PVConfig) -> tuple[FourierField, SingularRule]:
    sigma = kernels._check_sigma(sigma)
    F = to_fourier(f)
    delta = _choose_delta(F, sigma, f.grid.spacing, cfg)
    prefactor = kernels.riesz_prefactor(sigma, f.grid.dim).value
    rule = _singular_rule(f.grid.dim, sigma, f.grid.points_per_axis, delta, cfg, prefactor)
    bound = _remainder_bound(F, rule.ball_moments, cfg.taylor_order)
    if bound > cfg.tol:
        raise ResolutionError(
            f"Taylor remainder bound {bound:.2e} exceeds tol {cfg.tol:.2e}; pass a smaller delta"
        )
    return F, rule


def pointwise_symbol(F: FourierField, rule: SingularRule, order: int) -> np.ndarray:
    """sum_q w_q K(z_q)(1 - cos(nu.z_q)) plus the ball correction, per mode."""
    n = F.dim
    modes = F.modes()
    cos_sum = np.zeros(F.coeffs.shape)
    chunk = 20000
    for start in range(0, len(rule.nodes), chunk):
        z = rule.nodes[start:start + chunk]
        w = rule.weights[start:start + chunk]
        e = [np.exp(-1j * np.outer(z[:, a], modes)) for a in range(n)]
        if n == 1:
            s = w @ e[0]
        elif n == 2:
            s = (e[0] * w[:, None]).T @ e[1]
        else:
            s = np.einsum("q,qa,qb,qc->abc", w, e[0], e[1], e[2], optimize=True)
        cos_sum += np.sum(w) - s.real
    a2, a4 = _taylor_coeffs(n)
    lam = F.norm2()
    ball = a2 * lam * rule.ball_moments[2]
    if order == 2:
        ball = ball - a4 * lam**2 * rule.ball_moments[4]
    symbol = cos_sum + ball
    symbol[lam == 0] = 0.0  # 1 - cos(0) vanishes exactly
    return symbol


def frac_lap_pointwise_field(f: GridField, sigma: float, cfg: PVConfig = PVConfig(),
                             return_budget: bool = False):
    """Singular-integral route evaluated at every grid point."""
    F, rule = _prepare(f, sigma, cfg)
    symbol = pointwise_symbol(F, rule, cfg.taylor_order)
    out = to_grid(F.with_coeffs(F.coeffs * symbol), f.grid)
    if return_budget:
        return out, _budget(F, rule, cfg)
    return out


def _budget(F: FourierField, rule: SingularRule, cfg: PVConfig) -> ErrorBudget:
    a2, a4 = _taylor_coeffs(F.dim)
    lam = F.norm2()
    corr = np.abs(F.coeffs) * (a2 * lam * rule.ball_moments[2] + a4 * lam**2 * rule.ball_moments[4])
    return ErrorBudget(rule.delta, _remainder_bound(F, rule.ball_moments, cfg.taylor_order), float(np.sum(corr)))


def frac_lap_pointwise(f: GridField, x, sigma: float, cfg: PVConfig = PVConfig(),
                       return_budget: bool = False):
    """Singular-integral route at one grid point ``x`` (index tuple or coordinates)."""
    index = f.grid.resolve(x)
    F, rule = _prepare(f, sigma, cfg)
    n = f.grid.dim
    x0 = f.grid.point(index)
    fx = float(f.values[index])
    shifted = evaluate(F, x0[None, :] - rule.nodes)
    integrand = fx - shifted
    if sigma >= 1:
        grad = np.array([float(evaluate(partial_derivative(F, [int(a == b) for b in range(n)]), x0[None, :])[0])
                         for a in range(n)])
        integrand = integrand - rule.nodes @ grad
    lap = laplacian(F)
    lap_x = float(evaluate(lap, x0[None, :])[0])
    value = float(rule.weights @ integrand) - lap_x * rule.ball_moments[2] / (2 * n)
    if cfg.taylor_order == 2:
        bilap_x = float(evaluate(laplacian(lap), x0[None, :])[0])
        value -= bilap_x * rule.ball_moments[4] / (8 * n * (n + 2))
    if return_budget:
        return value, _budget(F, rule, cfg)
    return value


# ---------------------------------------------------------------- semigroup routes


def _mode_groups(F: FourierField, grid) -> tuple[np.ndarray, np.ndarray]:
    """Distinct |nu|^2 values and, per value, the field sum_{|nu|^2 = lam} c_nu e^{i nu.x}."""
    lam = np.rint(F.norm2()).astype(np.int64)
    levels = np.unique(lam[np.abs(F.coeffs) > 0])
    fields = np.empty((len(levels), grid.size))
    for i, level in enumerate(levels):
        part = np.where(lam == level, F.coeffs, 0)
        fields[i] = to_grid(F.with_coeffs(part), grid).values.ravel()
    return levels.astype(float), fields


def _check_quad(info_err, tol, what):
    if not np.all(np.isfinite(info_err)) or np.max(info_err) > tol:
        raise QuadratureError(f"{what} quadrature did not converge (error {np.max(info_err):.2e})")


def semigroup_formula_field(f: GridField, sigma: float, tol: float = 1e-11) -> GridField:
    """Heat-semigroup route at every grid point.

    (1/Gamma(-sigma/2)) int_0^inf (T_t f(x) - f(x)) t^{-1-sigma/2} dt, with
    T_t f evaluated spectrally. On (0, 1] the substitution t = u^q,
    q = 2/(2 - sigma), removes the t^{-sigma/2} endpoint singularity; the
    constant part of the integrand on (1, inf) is integrated exactly.
    """
    sigma = kernels._check_sigma(sigma)
    F = to_fourier(f)
    levels, fields = _mode_groups(F, f.grid)
    nonzero = levels > 0
    lv, fv = levels[nonzero], fields[nonzero]
    q = 2.0 / (2.0 - sigma)

    def head(u):
        t = u**q
        if t == 0:
            return q * (-lv) @ fv
        return q * (np.expm1(-t * lv) / t) @ fv

    def tail(t):
        return (np.exp(-t * lv) @ fv) * t ** (-1 - sigma / 2)

    opts = dict(epsabs=tol, epsrel=tol, norm="max", limit=2000)
    if len(lv):
        v1, e1 = integrate.quad_vec(head, 0.0, 1.0, **opts)
        v2, e2 = integrate.quad_vec(tail, 1.0, np.inf, **opts)
        _check_quad([e1, e2], 1e3 * tol, "heat-semigroup")
    else:
        v1 = v2 = np.zeros(f.grid.size)
    centered = f.values.ravel() - F.coefficient([0] * f.grid.dim).real
    total = v1 + v2 - centered * 2.0 / sigma
    return GridField(f.grid, kernels.reciprocal_gamma_neg_half(sigma) * total)


def semigroup_formula_eval(f: GridField, x, sigma: float, tol: float = 1e-12) -> float:
    """Heat-semigroup route at one grid point, by scalar adaptive quadrature."""
    sigma = kernels._check_sigma(sigma)
    index = f.grid.resolve(x)
    F = to_fourier(f)
    x0 = f.grid.point(index)
    lam = F.norm2().ravel()
    amp = (F.coeffs.ravel() * np.exp(1j * sum(k.ravel() * x0[a] for a, k in enumerate(F.wave_vectors())))).real
    keep = (lam > 0) & (amp != 0)
    lv, av = lam[keep], amp[keep]
    opts = dict(epsabs=tol, epsrel=tol, limit=500)
    if not len(lv):
        return 0.0
    head, _ = integrate.quad(
        lambda t: float(av @ (-lv if t == 0 else np.expm1(-t * lv) / t)), 0.0, 1.0,
        weight="alg", wvar=(-sigma / 2, 0), **opts,
    )
    tail, _ = integrate.quad(lambda t: float(av @ np.exp(-t * lv)) * t ** (-1 - sigma / 2), 1.0, np.inf, **opts)
    centered = float(np.sum(av))
    return kernels.reciprocal_gamma_neg_half(sigma) * (head + tail - centered * 2.0 / sigma)


def poisson_formula_field_1d(f: GridField, sigma: float, tol: float = 1e-11) -> GridField:
    """Poisson-semigroup route at every grid point (n = 1).

    (1/c_sigma) int_0^inf (P_t - I)^{[sigma]+1} f(x) t^{-1-sigma} dt with the
    iterated difference expanded as P_{2t} f - 2 P_t f + f when sigma >= 1.
    """
    if f.grid.dim != 1:
        raise InputError("the Poisson route is one-dimensional")
    sigma = kernels._check_sigma(sigma)
    F = to_fourier(f)
    levels, fields = _mode_groups(F, f.grid)
    nonzero = levels > 0
    kv, fv = np.sqrt(levels[nonzero]), fields[nonzero]
    order = int(sigma) + 1
    # (e^{-t k} - 1)^order / t^order, then t = u^q removes t^{order-1-sigma}
    q = 1.0 / (order - sigma)

    def diff_over(t):
        if t == 0:
            return (-kv) ** order
        return (np.expm1(-t * kv) / t) ** order

    def head(u):
        return q * diff_over(u**q) @ fv

    def tail(t):
        # (e^{-tk} - 1)^order minus its t -> inf limit (-1)^order
        return ((np.expm1(-t * kv)) ** order - (-1.0) ** order) @ fv * t ** (-1 - sigma)

    opts = dict(epsabs=tol, epsrel=tol, norm="max", limit=2000)
    if len(kv):
        v1, e1 = integrate.quad_vec(head, 0.0, 1.0, **opts)
        v2, e2 = integrate.quad_vec(tail, 1.0, np.inf, **opts)
        _check_quad([e1, e2], 1e3 * tol, "Poisson-semigroup")
    else:
        v1 = v2 = np.zeros(f.grid.size)
    centered = f.values.ravel() - F.coefficient([0]).real
    total = v1 + v2 + (-1.0) ** order * centered / sigma
    return GridField(f.grid, total / kernels.c_sigma(sigma))


def poisson_formula_eval_1d(f: GridField, x, sigma: float, tol: float = 1e-12) -> float:
    """Poisson-semigroup route at one grid point (n = 1)."""
    if f.grid.dim != 1:
        raise InputError("the Poisson route is one-dimensional")
    sigma = kernels._check_sigma(sigma)
    index = f.grid.resolve(x)
    F = to_fourier(f)
    x0 = f.grid.point(index)[0]
    kk = F.modes().astype(float)
    amp = (F.coeffs * np.exp(1j * kk * x0)).real
    keep = (kk != 0) & (amp != 0)
    kv, av = np.abs(kk[keep]), amp[keep]
    if not len(kv):
        return 0.0
    order = int(sigma) + 1
    opts = dict(epsabs=tol, epsrel=tol, limit=500)

    def diff_over(t):
        return (-kv) ** order if t == 0 else (np.expm1(-t * kv) / t) ** order

    head, _ = integrate.quad(lambda t: float(av @ diff_over(t)), 0.0, 1.0,
                             weight="alg", wvar=(order - 1 - sigma, 0), **opts)
    tail, _ = integrate.quad(
        lambda t: float(av @ (np.expm1(-t * kv) ** order - (-1.0) ** order)) * t ** (-1 - sigma),
        1.0, np.inf, **opts)
    total = head + tail + (-1.0) ** order * float(np.sum(av)) / sigma
    return total / kernels.c_sigma(sigma)


# ---------------------------------------------------------------- limit scans


def limit_zero_scan(f: GridField, sigmas: Sequence[float], cfg: PVConfig = PVConfig()) -> LimitScanReport:
    """sup |(-Delta)^{sigma/2} f - (f - mean f)| along a descending sigma list in (0, 1)."""
    sigmas = [float(s) for s in sigmas]
    if any(not 0 < s < 1 for s in sigmas) or np.any(np.diff(sigmas) >= 0):
        raise InputError("zero scan needs a strictly descending list in (0, 1)")
    target = f.values - mean(f)
    errs = [float(np.max(np.abs(frac_lap_pointwise_field(f, s, cfg).values - target))) for s in sigmas]
    return LimitScanReport(sigmas, errs, "zero_limit")


def limit_two_scan(f: GridField, sigmas: Sequence[float], include_above: bool = False,
                   cfg: PVConfig = PVConfig()) -> LimitScanReport:
    """sup |(-Delta)^{sigma/2} f + Delta f| along an ascending list in (1, 2).

    With ``include_above`` each sigma is mirrored to 4 - sigma in (2, 3), where
    the operator is realized as (-Delta)^{eps/2}(-Delta f), eps = sigma - 2.
    """
    sigmas = [float(s) for s in sigmas]
    if any(not 1 < s < 2 for s in sigmas) or np.any(np.diff(sigmas) <= 0):
        raise InputError("two scan needs a strictly ascending list in (1, 2)")
    neg_lap = to_grid(laplacian(to_fourier(f)), f.grid) * -1.0
    errs = [float(np.max(np.abs(frac_lap_pointwise_field(f, s, cfg).values - neg_lap.values))) for s in sigmas]
    all_sigmas = list(sigmas)
    if include_above:
        for s in reversed(sigmas):
            above = 4.0 - s
            val = frac_lap_pointwise_field(neg_lap, above - 2.0, cfg)
            errs.append(float(np.max(np.abs(val.values - neg_lap.values))))
            all_sigmas.append(above)
    return LimitScanReport(all_sigmas, errs, "two_limit")
