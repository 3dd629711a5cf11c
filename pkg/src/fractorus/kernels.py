"""Heat, Riesz and one-dimensional Poisson kernels on the torus.

Lattice sums
------------
The periodized Riesz kernel is a lattice sum of ``|x - 2 pi nu|^{-(n+sigma)}``
whose tail decays only like ``R^{-sigma}``. Plain truncation cannot reach
useful accuracy for small sigma, so the sum over the box ``|nu_i| <= R`` is
completed by an Euler-Maclaurin estimate of the exterior: the exterior of the
box is exactly the union of unit cells around the omitted lattice points, so
the omitted sum equals the exterior integral minus midpoint-rule corrections.
Each correction is an integral of a derivative of ``|w|^{-p}`` over the box
exterior and reduces to integrals over the box faces, evaluated by
Gauss-Legendre. The change in the result when the box grows by one shell
is reported as the error estimate.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, special

from .errors import InputError, QuadratureError, TruncationError


@dataclass(frozen=True)
class KernelConfig:
    """Truncation and tolerance parameters shared by all kernel evaluations."""

    crossover_t: float = 0.5
    lattice_radius: int = 10
    spectral_radius: int = 64
    quad_rel_tol: float = 1e-10
    quad_abs_tol: float = 1e-13
    max_lattice_radius: int = 640

    def __post_init__(self):
        if not self.crossover_t > 0:
            raise InputError("crossover_t must be positive")
        if self.lattice_radius < 1 or self.spectral_radius < 1:
            raise InputError("truncation radii must be >= 1")
        if self.max_lattice_radius < self.lattice_radius:
            raise InputError("max_lattice_radius must be >= lattice_radius")
        for tol in (self.quad_rel_tol, self.quad_abs_tol):
            if not 0 < tol < 1e-6:
                raise InputError("tolerances must lie in (0, 1e-6)")


DEFAULT_CONFIG = KernelConfig()


# ---------------------------------------------------------------- constants


def log_abs_gamma_negative(a: float) -> float:
    """log|Gamma(-a)| for a > 0 not an integer, via reflection."""
    if a <= 0 or float(a).is_integer():
        raise InputError("a must be positive and non-integer")
    return math.log(math.pi) - math.log(abs(math.sin(math.pi * a))) - special.gammaln(1 + a)


def reciprocal_gamma_neg_half(sigma: float) -> float:
    """1/Gamma(-sigma/2) for sigma in (0, 2), finite at both ends."""
    return -math.sin(math.pi * sigma / 2) * math.exp(special.gammaln(1 + sigma / 2)) / math.pi


@dataclass(frozen=True)
class RieszConstant:
    n: int
    sigma: float
    value: float


def _check_sigma(sigma: float) -> float:
    sigma = float(sigma)
    if not 0 < sigma < 2:
        raise InputError(f"sigma must lie in (0, 2), got {sigma}")
    return sigma


def riesz_prefactor(sigma: float, n: int) -> RieszConstant:
    """2^sigma Gamma((n+sigma)/2) / (|Gamma(-sigma/2)| pi^{n/2}), via log-Gamma."""
    sigma = _check_sigma(sigma)
    logv = (
        sigma * math.log(2.0)
        + special.gammaln((n + sigma) / 2)
        - log_abs_gamma_negative(sigma / 2)
        - 0.5 * n * math.log(math.pi)
    )
    return RieszConstant(n, sigma, math.exp(logv))


def _expm1_ratio(x: float) -> float:
    """(2^x - 1)/x, continuous at x = 0."""
    if x == 0:
        return math.log(2.0)
    return math.expm1(x * math.log(2.0)) / x


def c_sigma(sigma: float) -> float:
    """Integral of (e^{-s} - 1)^{[sigma]+1} s^{-1-sigma} over (0, inf), closed form.

    Gamma(-sigma) for sigma < 1 and (2^sigma - 2) Gamma(-sigma) for sigma >= 1,
    written with positive Gamma arguments only; the value at sigma = 1 is the
    removable limit 2 log 2.
    """
    sigma = _check_sigma(sigma)
    if sigma < 1:
        return -math.pi / (math.sin(math.pi * sigma) * math.exp(special.gammaln(1 + sigma)))
    # (2^s - 2) Gamma(-s) = 2 (2^{s-1} - 1)/(s - 1) * Gamma(2 - s)/s
    return 2.0 * _expm1_ratio(sigma - 1) * math.exp(special.gammaln(2 - sigma)) / sigma


def _expm1_over(s: float) -> float:
    return math.expm1(-s) / s if s > 0 else -1.0


def c_sigma_quadrature(sigma: float, cfg: KernelConfig = DEFAULT_CONFIG) -> tuple[float, float]:
    """Adaptive quadrature of the defining integral of c_sigma; returns (value, error)."""
    sigma = _check_sigma(sigma)
    k = int(sigma) + 1
    opts = dict(epsabs=cfg.quad_abs_tol, epsrel=cfg.quad_rel_tol, limit=200)
    if k == 1:
        # near 0: (e^{-s}-1)/s * s^{-sigma}
        head, e1 = integrate.quad(_expm1_over, 0, 1, weight="alg", wvar=(-sigma, 0), **opts)
        # (e^{-s}-1) s^{-1-sigma} on (1, inf) = e^{-s} s^{-1-sigma} - s^{-1-sigma}
        tail, e2 = integrate.quad(lambda s: math.exp(-s) * s ** (-1 - sigma), 1, np.inf, **opts)
        return head + tail - 1.0 / sigma, e1 + e2
    head, e1 = integrate.quad(
        lambda s: _expm1_over(s) ** 2, 0, 1, weight="alg", wvar=(1 - sigma, 0), **opts
    )
    tail, e2 = integrate.quad(
        lambda s: (math.exp(-2 * s) - 2 * math.exp(-s)) * s ** (-1 - sigma), 1, np.inf, **opts
    )
    return head + tail + 1.0 / sigma, e1 + e2


# ---------------------------------------------------------------- heat kernel


def _as_points(x, n: int) -> tuple[np.ndarray, tuple]:
    """Reshape input to (P, n); return the leading shape for the output."""
    arr = np.asarray(x, dtype=float)
    if n == 1:
        if arr.ndim >= 1 and arr.shape[-1:] == (1,) and arr.ndim > 1:
            lead = arr.shape[:-1]
        else:
            lead = arr.shape
        return arr.reshape(-1, 1), lead
    if arr.shape[-1:] != (n,):
        raise InputError(f"points must have a trailing axis of length {n}")
    return arr.reshape(-1, n), arr.shape[:-1]


def _scalar(v) -> float:
    return float(np.ravel(v)[0])


def wrap_to_cube(x: np.ndarray) -> np.ndarray:
    """Map coordinates into (-pi, pi] modulo 2 pi."""
    y = np.mod(x + math.pi, 2 * math.pi) - math.pi
    return np.where(y == -math.pi, math.pi, y)


def _heat_1d_gaussian(x: np.ndarray, t: float, radius: int) -> tuple[np.ndarray, float]:
    nu = np.arange(-radius, radius + 1)
    d = x[..., None] - 2 * math.pi * nu
    val = np.exp(-(d**2) / (4 * t)).sum(axis=-1) / math.sqrt(4 * math.pi * t)
    first = ((2 * radius + 1) * math.pi) ** 2 / (4 * t)
    ratio = math.exp(-(8 * radius + 8) * math.pi**2 / (4 * t))
    tail = 2 * math.exp(-first) / (1 - ratio) / math.sqrt(4 * math.pi * t)
    return val, tail


def _heat_1d_spectral(x: np.ndarray, t: float, radius: int) -> tuple[np.ndarray, float]:
    k = np.arange(1, radius + 1)
    val = (1 + 2 * (np.exp(-t * k**2) * np.cos(x[..., None] * k)).sum(axis=-1)) / (2 * math.pi)
    tail = math.exp(-t * (radius + 1) ** 2) / (1 - math.exp(-t * (2 * radius + 3))) / math.pi
    return val, tail


def heat_kernel(x, t: float, n: int, cfg: KernelConfig = DEFAULT_CONFIG, method: str = "auto",
                return_error: bool = False):
    """Periodic heat kernel W_t(x) on the n-torus.

    Uses the periodized Gaussian for ``t <= cfg.crossover_t`` and the Fourier
    series otherwise (``method`` can force either). The kernel factorizes
    over axes, so both series are summed per axis.
    """
    if not t > 0:
        raise InputError("heat kernel needs t > 0")
    if method == "auto":
        method = "gaussian" if t <= cfg.crossover_t else "spectral"
    if method not in ("gaussian", "spectral"):
        raise InputError(f"unknown method {method!r}")
    pts, lead = _as_points(x, n)
    pts = wrap_to_cube(pts)
    if method == "gaussian":
        factors = [_heat_1d_gaussian(pts[:, a], t, cfg.lattice_radius) for a in range(n)]
    else:
        factors = [_heat_1d_spectral(pts[:, a], t, cfg.spectral_radius) for a in range(n)]
    val = np.prod([f[0] for f in factors], axis=0)
    upper = np.prod([np.abs(f[0]) + f[1] for f in factors], axis=0)
    err = upper - np.abs(val)
    if np.max(err) > cfg.quad_abs_tol:
        raise TruncationError(
            f"{method} heat-kernel series at t={t} needs a larger radius (tail bound {np.max(err):.2e})"
        )
    val = val.reshape(lead)
    return (val, err.reshape(lead)) if return_error else val


# ---------------------------------------------------------------- Riesz kernel


@lru_cache(maxsize=None)
def _lattice_images(n: int, radius: int) -> np.ndarray:
    rng = np.arange(-radius, radius + 1)
    grid = np.array(list(itertools.product(rng, repeat=n)), dtype=float)
    return 2 * math.pi * grid


@lru_cache(maxsize=None)
def _gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(order)


def _face_integrals(pts: np.ndarray, radius: int, p: float, order: int = 24) -> dict:
    """Exterior-of-box integrals of |w|^{-q} and of sum_i d_i^4 |w|^{-p}.

    In shifted coordinates w = 2 pi nu - x the omitted cells fill the
    exterior of the box prod_i [-(2R+1) pi - x_i, (2R+1) pi - x_i]. Returns
    ``E[q]`` for q in (p, p+2, p+4, p+6) and ``S4``, each of shape (P,).
    """
    npts, n = pts.shape
    half = (2 * radius + 1) * math.pi
    gx, gw = _gauss_legendre(order)
    qs = (p, p + 2, p + 4, p + 6)
    face_sum = {q: np.zeros(npts) for q in qs}
    s4 = np.zeros(npts)
    c1, c2 = 3 * p * (p + 2), p * (p + 2) * (p + 4)
    for axis in range(n):
        others = [a for a in range(n) if a != axis]
        # tensor Gauss-Legendre nodes on the face rectangle, per point
        u2 = np.zeros((npts, 1))
        weight = np.ones((npts, 1))
        for a in others:
            lo, hi = -half - pts[:, a], half - pts[:, a]
            mid, rad = 0.5 * (hi + lo), 0.5 * (hi - lo)
            node = mid[:, None] + rad[:, None] * gx[None, :]
            u2 = (u2[:, :, None] + node[:, None, :] ** 2).reshape(npts, -1)
            weight = (weight[:, :, None] * (rad[:, None] * gw[None, :])[:, None, :]).reshape(npts, -1)
        for sign in (1.0, -1.0):
            d = half - sign * pts[:, axis]
            r2 = d[:, None] ** 2 + u2
            for q in qs:
                face_sum[q] += d * np.sum(weight * r2 ** (-q / 2), axis=1)
            third = c1 * d[:, None] * r2 ** (-(p + 4) / 2) - c2 * d[:, None] ** 3 * r2 ** (-(p + 6) / 2)
            s4 -= np.sum(weight * third, axis=1)
    return {"E": {q: face_sum[q] / (q - n) for q in qs}, "S4": s4}


def lattice_tail(pts: np.ndarray, radius: int, sigma: float) -> np.ndarray:
    """Euler-Maclaurin estimate of sum_{|nu|_inf > R} |x - 2 pi nu|^{-(n+sigma)}.

    Includes the second- and fourth-order midpoint corrections; the
    remainder is of order R^{-sigma-6}.
    """
    n = pts.shape[1]
    if n > 1 and len(pts) > 4096:
        return np.concatenate([lattice_tail(pts[i:i + 4096], radius, sigma) for i in range(0, len(pts), 4096)])
    p = n + sigma
    fi = _face_integrals(pts, radius, p)
    e, s4 = fi["E"], fi["S4"]
    two_pi = 2 * math.pi
    lap = p * (p + 2 - n) * e[p + 2]
    bilap = p * (p + 2 - n) * (p + 2) * (p + 4 - n) * e[p + 4]
    mixed = 0.5 * (bilap - s4)
    est = e[p] - two_pi**2 / 24 * lap + two_pi**4 * (7 / 5760 * s4 + mixed / 576)
    return est / two_pi**n


def _box_sum(pts: np.ndarray, images: np.ndarray, p: float) -> np.ndarray:
    out = np.empty(len(pts))
    chunk = max(1, 2_000_000 // len(images))
    for start in range(0, len(pts), chunk):
        block = pts[start:start + chunk]
        r2 = np.zeros((len(block), len(images)))
        for a in range(pts.shape[1]):
            r2 += (block[:, a:a + 1] - images[None, :, a]) ** 2
        out[start:start + chunk] = np.sum(r2 ** (-p / 2), axis=1)
    return out


def riesz_lattice_sum(pts: np.ndarray, sigma: float, radius: int) -> tuple[np.ndarray, np.ndarray]:
    """sum_nu |x - 2 pi nu|^{-(n+sigma)} without prefactor, with an error estimate.

    The estimate is the change in the completed sum when the explicit box
    grows from radius R to R + 1, plus a rounding allowance.
    """
    n = pts.shape[1]
    p = n + sigma
    images = _lattice_images(n, radius)
    box = _box_sum(pts, images, p)
    total = box + lattice_tail(pts, radius, sigma)
    outer = _lattice_images(n, radius + 1)
    shell = outer[np.max(np.abs(outer), axis=1) > 2 * math.pi * radius + 1e-9]
    total_next = box + _box_sum(pts, shell, p) + lattice_tail(pts, radius + 1, sigma)
    rounding = 4 * np.finfo(float).eps * np.abs(box) * math.log2(len(images))
    return total, np.abs(total_next - total) + rounding


def riesz_kernel(x, sigma: float, n: int, cfg: KernelConfig = DEFAULT_CONFIG, return_error: bool = False):
    """Periodized Riesz kernel c_{n,sigma} sum_nu |x - 2 pi nu|^{-(n+sigma)}.

    The truncation radius starts at ``cfg.lattice_radius`` and is doubled
    until the estimated error meets the tolerance or ``max_lattice_radius``
    is reached, in which case ``TruncationError`` is raised.
    """
    sigma = _check_sigma(sigma)
    pts, lead = _as_points(x, n)
    pts = wrap_to_cube(pts)
    if np.any(np.all(pts == 0, axis=1)):
        raise InputError("the Riesz kernel is singular at x = 0")
    const = riesz_prefactor(sigma, n).value
    radius = cfg.lattice_radius
    while True:
        total, err = riesz_lattice_sum(pts, sigma, radius)
        val, err = const * total, const * err
        tol = np.maximum(cfg.quad_abs_tol, cfg.quad_rel_tol * np.abs(val))
        if np.all(err <= tol):
            break
        if radius * 2 > cfg.max_lattice_radius:
            raise TruncationError(
                f"lattice radius {radius} cannot reach the tolerance (error {np.max(err):.2e})"
            )
        radius *= 2
    val, err = val.reshape(lead), err.reshape(lead)
    return (val, err) if return_error else val


def riesz_kernel_regular_part_at_zero(sigma: float, n: int, cfg: KernelConfig = DEFAULT_CONFIG) -> float:
    """Value at 0 of K(z) - c_{n,sigma}|z|^{-(n+sigma)}: the lattice sum without nu = 0."""
    return float(riesz_kernel_regular_part(np.zeros((1, n)), sigma, n, cfg)[0])


def riesz_kernel_regular_part(x, sigma: float, n: int, cfg: KernelConfig = DEFAULT_CONFIG) -> np.ndarray:
    """K(z) - c_{n,sigma}|z|^{-(n+sigma)} for z in the fundamental cube, summed without the nu = 0 image."""
    sigma = _check_sigma(sigma)
    pts, lead = _as_points(x, n)
    if np.any(np.abs(pts) > math.pi + 1e-12):
        raise InputError("points must lie in the fundamental cube [-pi, pi]^n")
    const = riesz_prefactor(sigma, n).value
    p = n + sigma
    radius = cfg.lattice_radius
    while True:
        images = _lattice_images(n, radius)
        images = images[np.any(images != 0, axis=1)]
        total = _box_sum(pts, images, p) + lattice_tail(pts, radius, sigma)
        outer = _lattice_images(n, radius + 1)
        shell = outer[np.max(np.abs(outer), axis=1) > 2 * math.pi * radius + 1e-9]
        nxt = total - lattice_tail(pts, radius, sigma) + _box_sum(pts, shell, p) + lattice_tail(pts, radius + 1, sigma)
        err = np.abs(nxt - total) + 4 * np.finfo(float).eps * np.abs(total) * math.log2(len(images))
        if np.all(const * err <= np.maximum(cfg.quad_abs_tol, cfg.quad_rel_tol * const * np.abs(total))):
            return (const * total).reshape(lead)
        if radius * 2 > cfg.max_lattice_radius:
            raise TruncationError(f"lattice radius {radius} cannot reach the tolerance (error {np.max(err):.2e})")
        radius *= 2


class RegularPartInterpolant:
    """Tensor Chebyshev fit of the regular part on [-pi, pi]^n.

    The regular part is analytic on the closed cube (every omitted image is
    at least pi away from it), even in each coordinate and symmetric under
    coordinate permutations, so exact values are only computed at sorted
    nonnegative node tuples.
    """

    def __init__(self, sigma: float, n: int, cfg: KernelConfig = DEFAULT_CONFIG, degree: int = 32):
        self.n, self.degree = n, degree
        nodes = math.pi * np.cos(math.pi * (np.arange(degree) + 0.5) / degree)
        index = {}
        for combo in itertools.product(range(degree), repeat=n):
            index.setdefault(tuple(sorted(abs(nodes[c]) for c in combo)), []).append(combo)
        keys = list(index)
        vals = riesz_kernel_regular_part(np.array(keys), sigma, n, cfg)
        table = np.empty((degree,) * n)
        for key, v in zip(keys, np.atleast_1d(vals)):
            for combo in index[key]:
                table[combo] = v
        # values -> coefficients through the inverse Chebyshev-Vandermonde matrix on each axis
        inv = np.linalg.inv(np.polynomial.chebyshev.chebvander(nodes / math.pi, degree - 1))
        coeffs = table
        for axis in range(n):
            coeffs = np.moveaxis(np.tensordot(inv, coeffs, axes=(1, axis)), 0, axis)
        self.coeffs = coeffs

    def __call__(self, pts: np.ndarray, chunk: int = 20000) -> np.ndarray:
        pts = np.asarray(pts, dtype=float).reshape(-1, self.n)
        out = np.empty(len(pts))
        for start in range(0, len(pts), chunk):
            block = pts[start:start + chunk] / math.pi
            basis = [np.polynomial.chebyshev.chebvander(block[:, a], self.degree - 1) for a in range(self.n)]
            acc = basis[0] @ self.coeffs.reshape(self.degree, -1)
            for a in range(1, self.n):
                acc = np.einsum("qk,qkr->qr", basis[a], acc.reshape(len(block), self.degree, -1))
            out[start:start + chunk] = acc[:, 0]
        return out


def riesz_kernel_heat(x, sigma: float, n: int, cfg: KernelConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Riesz kernel as |Gamma(-sigma/2)|^{-1} times the t-integral of W_t(x) t^{-1-sigma/2}.

    Independent of the lattice route; each point costs a few adaptive
    quadratures, so this is meant for validation.
    """
    sigma = _check_sigma(sigma)
    pts, lead = _as_points(x, n)
    pts = wrap_to_cube(pts)
    scale = abs(reciprocal_gamma_neg_half(sigma))
    opts = dict(epsabs=cfg.quad_abs_tol, epsrel=cfg.quad_rel_tol, limit=200)
    mean_level = (2 * math.pi) ** (-n)
    out = np.empty(len(pts))
    for i, pt in enumerate(pts):
        r2 = float(pt @ pt)
        if r2 == 0:
            raise InputError("the Riesz kernel is singular at x = 0")

        def near(t, pt=pt):
            return _scalar(heat_kernel(pt[None, :] if n > 1 else pt, t, n, cfg)) * t ** (-1 - sigma / 2)

        def far(t, pt=pt):
            return (_scalar(heat_kernel(pt[None, :] if n > 1 else pt, t, n, cfg)) - mean_level) * t ** (-1 - sigma / 2)

        peak = min(r2 / (2 * (n + sigma)), 0.5)
        breaks = sorted({peak, cfg.crossover_t})
        total = 0.0
        edges = [0.0, *[b for b in breaks if b < 1], 1.0]
        for a, b in zip(edges[:-1], edges[1:]):
            if b > a:
                val, err = integrate.quad(near, a, b, **opts)
                total += val
        val, err = integrate.quad(far, 1.0, np.inf, **opts)
        total += val + mean_level * 2 / sigma
        out[i] = scale * total
    return out.reshape(lead)


def odd_moment(sigma: float, n: int, axis: int = 0, points_per_axis: int = 64,
               cfg: KernelConfig = DEFAULT_CONFIG) -> float:
    """Midpoint-rule integral of z_axis K(z) over the cube (principal value).

    The midpoint nodes are symmetric about 0 and avoid the singularity.
    """
    h = 2 * math.pi / points_per_axis
    axis_nodes = -math.pi + (np.arange(points_per_axis) + 0.5) * h
    mesh = np.meshgrid(*([axis_nodes] * n), indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    vals = riesz_kernel(pts if n > 1 else pts[:, 0], sigma, n, cfg)
    return float(np.sum(pts[:, axis] * vals) * h**n)


# ---------------------------------------------------------------- 1D Poisson kernels


def _check_t(t):
    if np.any(np.asarray(t) <= 0):
        raise InputError("Poisson kernel needs t > 0")


def poisson_kernel_1d(x, t):
    """(1 - e^{-2t}) / (2 pi ((1 - e^{-t})^2 + 4 e^{-t} sin^2(x/2)))."""
    _check_t(t)
    x, t = np.asarray(x, dtype=float), np.asarray(t, dtype=float)
    return _poisson_over_t(x, t) * t


def _decay_over_t(t, rate):
    """(1 - e^{-rate t})/t, equal to ``rate`` at t = 0."""
    t = np.asarray(t, dtype=float)
    safe = np.where(t > 0, t, 1.0)
    return np.where(t > 0, -np.expm1(-rate * safe) / safe, float(rate))


def _poisson_over_t(x, t):
    # P_t(x)/t, finite as t -> 0 for x != 0
    t = np.asarray(t, dtype=float)
    one_m = -np.expm1(-t)
    s2 = np.sin(x / 2) ** 2
    return _decay_over_t(t, 2) / (2 * math.pi * (one_m**2 + 4 * np.exp(-t) * s2))


def poisson_difference_kernel(x, t):
    """D_t(x) = 2 P_t(x) - P_{2t}(x) in a factored, cancellation-free form (nonnegative)."""
    _check_t(t)
    x, t = np.asarray(x, dtype=float), np.asarray(t, dtype=float)
    return _difference_over_t3(x, t) * t**3


def _difference_over_t3(x, t):
    t = np.asarray(t, dtype=float)
    e = np.exp(-t)
    one_m = -np.expm1(-t)
    one_m2 = -np.expm1(-2 * t)
    s2 = np.sin(x / 2) ** 2
    c2 = np.cos(x / 2) ** 2
    num = _decay_over_t(t, 2) * _decay_over_t(t, 1) ** 2 * (1 + e**2 + 4 * e * c2)
    den = 2 * math.pi * (one_m**2 + 4 * e * s2) * (one_m2**2 + 4 * e**2 * s2)
    return num / den


def riesz_kernel_poisson(x, sigma: float, cfg: KernelConfig = DEFAULT_CONFIG) -> np.ndarray:
    """One-dimensional Riesz kernel through the Poisson semigroup.

    sigma < 1:  (1/(-c_sigma)) int P_t(x) t^{-1-sigma} dt
    sigma >= 1: (1/c_sigma) int (2 P_t(x) - P_{2t}(x)) t^{-1-sigma} dt
    """
    sigma = _check_sigma(sigma)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    xs_w = wrap_to_cube(xs)
    if np.any(xs_w == 0):
        raise InputError("the Riesz kernel is singular at x = 0")
    small = sigma < 1
    const = -c_sigma(sigma) if small else c_sigma(sigma)
    opts = dict(epsabs=cfg.quad_abs_tol, epsrel=cfg.quad_rel_tol, limit=200)
    out = np.empty(len(xs_w))
    for i, xi in enumerate(xs_w):
        scale = min(abs(math.sin(xi / 2)), 1.0)
        if small:
            def head(t, xi=xi):
                return float(_poisson_over_t(xi, t))
            wvar = (-sigma, 0)
            kern = poisson_kernel_1d
        else:
            def head(t, xi=xi):
                return float(_difference_over_t3(xi, t))
            wvar = (2 - sigma, 0)
            kern = poisson_difference_kernel
        total = 0.0
        # t = s * |sin(x/2)| resolves the near-diagonal peak
        # the algebraic weight (t - a)^alpha is anchored at the left endpoint,
        # so it is only used on the first piece
        val, _ = integrate.quad(head, 0.0, scale, weight="alg", wvar=wvar, **opts)
        total += val
        if scale < 1.0:
            val, _ = integrate.quad(
                lambda t, xi=xi: float(kern(xi, t)) * t ** (-1 - sigma), scale, 1.0, **opts
            )
            total += val
        if not np.isfinite(total):
            raise QuadratureError("Poisson kernel quadrature failed")
        val, err = integrate.quad(
            lambda t, xi=xi: (float(kern(xi, t)) - 1 / (2 * math.pi)) * t ** (-1 - sigma), 1.0, np.inf, **opts
        )
        total += val + 1 / (2 * math.pi * sigma)
        out[i] = total / const
    return out.reshape(np.shape(x)) if np.ndim(x) else out[0]


def sandwich_ratio(x, sigma: float, kernel_values) -> np.ndarray:
    """K(x) times the scale that the two-sided kernel bounds predict to be O(1).

    sigma < 1:  K(x) (-c_sigma)(1 - sigma) |sin(x/2)|^{1+sigma}
    sigma >= 1: K(x) c_sigma |sin(x/2)|^{1+sigma}
    """
    sigma = _check_sigma(sigma)
    s = np.abs(np.sin(np.asarray(x, dtype=float) / 2)) ** (1 + sigma)
    if sigma < 1:
        return np.asarray(kernel_values) * (-c_sigma(sigma)) * (1 - sigma) * s
    return np.asarray(kernel_values) * c_sigma(sigma) * s


def kernel_table(kind: str, xs, sigmas=(), ts=(), n: int = 1, cfg: KernelConfig = DEFAULT_CONFIG) -> list[dict]:
    """Rows (x..., sigma, t, value, est_error) for the CLI kernel-table command."""
    rows = []
    pts, _ = _as_points(xs, n)
    for pt in pts:
        coords = {f"x{a + 1}" if n > 1 else "x": float(pt[a]) for a in range(n)}
        arg = pt if n > 1 else pt[0]
        if kind == "heat":
            for t in ts:
                val, err = heat_kernel(arg[None] if n > 1 else arg, t, n, cfg, return_error=True)
                rows.append({**coords, "sigma": None, "t": t, "value": _scalar(val), "est_error": _scalar(err)})
        elif kind == "riesz":
            for s in sigmas:
                val, err = riesz_kernel(arg[None] if n > 1 else arg, s, n, cfg, return_error=True)
                rows.append({**coords, "sigma": s, "t": None, "value": _scalar(val), "est_error": _scalar(err)})
        elif kind == "poisson":
            if n != 1:
                raise InputError("the Poisson kernel is one-dimensional")
            for t in ts:
                rows.append({**coords, "sigma": None, "t": t, "value": float(poisson_kernel_1d(arg, t)),
                             "est_error": 0.0})
        elif kind == "riesz-poisson":
            if n != 1:
                raise InputError("the Poisson route is one-dimensional")
            for s in sigmas:
                rows.append({**coords, "sigma": s, "t": None, "value": _scalar(riesz_kernel_poisson(arg, s, cfg)),
                             "est_error": float(cfg.quad_rel_tol)})
        else:
            raise InputError(f"unknown kernel kind {kind!r}")
    return rows
