"""Acceptance suite shared by ``fractorus selftest`` and the test-suite.

Each criterion is a function returning a list of ``Check`` results; a
criterion passes when all of its checks pass. ``mutated`` perturbs one of the
analytic constants in place so the suite can demonstrate that it notices.
"""

from __future__ import annotations

import contextlib
import math
import time
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np
from scipy import special

from . import extension, kernels, pointwise, regularity
from .errors import InputError
from .fields import GridField, GridSpec, to_fourier
from .io import random_bandlimited
from .spectral import frac_laplacian_spectral


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    value: float
    threshold: float

    def line(self, number: int, topic: str) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {number} {topic}: {self.name}: {self.value:.3e} (limit {self.threshold:.1e})"


def _below(name: str, value: float, threshold: float) -> Check:
    value = float(value)
    return Check(name, bool(np.isfinite(value) and value < threshold), value, threshold)


def _cos(nu: int, m: int, dim: int = 1) -> GridField:
    return GridField.from_function(GridSpec(dim, m), lambda *x: np.cos(nu * x[0]))


def _sup(a: GridField, b: GridField) -> float:
    return float(np.max(np.abs(a.values - b.values)))


# ---------------------------------------------------------------- criteria


def spectral_equivalence() -> list[Check]:
    start = time.perf_counter()
    checks = []
    sigmas = (0.3, 0.7, 1.0, 1.3, 1.8)
    cases = [(f"cos{nu}x n=1", _cos(nu, 64)) for nu in range(1, 5)]
    cases.append(("cos_x1_cos_x2 n=2", GridField.from_function(GridSpec(2, 32), lambda x, y: np.cos(x) * np.cos(y))))
    for label, f in cases:
        for s in sigmas:
            ref = frac_laplacian_spectral(f, s)
            checks.append(_below(f"pointwise {label} sigma={s}", _sup(pointwise.frac_lap_pointwise_field(f, s), ref), 1e-5))
            checks.append(_below(f"heat-integral {label} sigma={s}", _sup(pointwise.semigroup_formula_field(f, s), ref), 1e-5))
            if f.grid.dim == 1:
                checks.append(_below(f"poisson-difference {label} sigma={s}",
                                     _sup(pointwise.poisson_formula_field_1d(f, s), ref), 1e-5))
    checks.append(_below("runtime seconds", time.perf_counter() - start, 120.0))
    return checks


def heat_duality() -> list[Check]:
    checks = []
    ts = np.linspace(0.05, 5.0, 20)
    xs = np.linspace(-math.pi, math.pi, 20)
    for n in (1, 2):
        worst = 0.0
        pts = xs if n == 1 else np.stack([xs, 0.7 * xs[::-1]], axis=1)
        for t in ts:
            a = kernels.heat_kernel(pts, t, n, method="gaussian")
            b = kernels.heat_kernel(pts, t, n, method="spectral")
            worst = max(worst, float(np.max(np.abs(a - b))))
        checks.append(_below(f"gaussian vs spectral series n={n}", worst, 2e-12))
        m = 128 if n == 1 else 64
        grid = GridSpec(n, m)
        coords = np.stack([c.ravel() for c in grid.coords()], axis=1)
        mass_err = 0.0
        for t in ts:
            vals = kernels.heat_kernel(coords if n > 1 else coords[:, 0], t, n)
            mass_err = max(mass_err, abs(float(np.sum(vals)) * grid.spacing**n - 1.0))
        checks.append(_below(f"unit mass n={n}", mass_err, 1e-11))
    return checks


def brute_force_riesz_sigma1(xs: np.ndarray, radius: int = 10**6) -> np.ndarray:
    """Direct lattice sum for sigma = 1, n = 1, with the integral estimate of the two tails."""
    nu = np.arange(-radius, radius + 1, dtype=float)
    out = np.empty(len(xs))
    for i, x in enumerate(xs):
        out[i] = np.sum(1.0 / (x - 2 * math.pi * nu) ** 2)
        # sum_{|nu| > R} (x - 2 pi nu)^{-2} ~ integral from R + 1/2 on both sides
        out[i] += 1 / (2 * math.pi * (2 * math.pi * (radius + 0.5) - x)) + 1 / (2 * math.pi * (2 * math.pi * (radius + 0.5) + x))
    const = 2 * special.gamma(1.0) / (2 * math.sqrt(math.pi) * math.sqrt(math.pi))
    return const * out


_BRUTE_CACHE: dict = {}


def riesz_closed_form() -> list[Check]:
    xs = math.pi * np.arange(1, 9) / 8
    closed = 1 / (4 * math.pi * np.sin(xs / 2) ** 2)
    vals = kernels.riesz_kernel(xs, 1.0, 1)
    if "sigma1" not in _BRUTE_CACHE:
        _BRUTE_CACHE["sigma1"] = brute_force_riesz_sigma1(xs)
    brute = _BRUTE_CACHE["sigma1"]
    return [
        _below("riesz_kernel vs 1/(4 pi sin^2(x/2))", float(np.max(np.abs(vals - closed))), 1e-8),
        _below("riesz_kernel vs brute-force lattice sum", float(np.max(np.abs(vals - brute))), 1e-8),
    ]


def constants() -> list[Check]:
    checks = []
    half_q, _ = kernels.c_sigma_quadrature(0.5)
    three_q, _ = kernels.c_sigma_quadrature(1.5)
    checks.append(_below("c_1/2 closed form vs -2 sqrt(pi)", abs(kernels.c_sigma(0.5) + 2 * math.sqrt(math.pi)), 1e-9))
    checks.append(_below("c_1/2 quadrature vs closed form", abs(half_q - kernels.c_sigma(0.5)), 1e-9))
    target = (2**1.5 - 2) * special.gamma(-1.5)
    checks.append(_below("c_3/2 closed form vs (2^1.5-2) Gamma(-3/2)", abs(kernels.c_sigma(1.5) - target), 1e-9))
    checks.append(_below("c_3/2 quadrature vs closed form", abs(three_q - kernels.c_sigma(1.5)), 1e-9))
    lo, hi = 1e-3, 2 - 1e-3
    gamma_lo = (-2 / lo) * kernels.reciprocal_gamma_neg_half(lo)
    gamma_hi = (1 / (hi - 2)) * kernels.reciprocal_gamma_neg_half(hi)
    checks.append(_below("(-2/sigma)/Gamma(-sigma/2) -> 1 at 1e-3", abs(gamma_lo - 1), 1e-3))
    checks.append(_below("(sigma-2)^-1/Gamma(-sigma/2) -> 1/2 at 2-1e-3", abs(gamma_hi / 0.5 - 1), 1e-3))
    checks.append(_below("1/c_sigma ~ -sigma at 1e-3", abs((1 / kernels.c_sigma(lo)) / (-lo) - 1), 1e-3))
    checks.append(_below("1/c_sigma ~ 2-sigma at 2-1e-3", abs((1 / kernels.c_sigma(hi)) / (2 - hi) - 1), 1e-3))
    return checks


def limits() -> list[Check]:
    f = _cos(2, 64)
    zero = pointwise.limit_zero_scan(f, [0.5, 0.1, 0.01, 0.001])
    two = pointwise.limit_two_scan(f, [1.5, 1.9, 1.99, 1.999], include_above=True)
    checks = []
    for s, e in zip(zero.sigmas, zero.sup_errors):
        checks.append(_below(f"zero scan sigma={s}", abs(e - abs(2**s - 1)), 1e-6))
    for s, e in zip(two.sigmas, two.sup_errors):
        checks.append(_below(f"two scan sigma={s}", abs(e - abs(2**s - 4)), 1e-6))
    checks.append(Check("zero scan monotone toward 0", zero.monotone_toward_endpoint(), 0.0, 0.0))
    checks.append(Check("two scan monotone toward 2 on both sides", two.monotone_toward_endpoint(), 0.0, 0.0))
    return checks


def kernel_bounds() -> list[Check]:
    checks = []
    xs = math.pi * np.arange(1, 17) / 16
    for pair in ((0.25, 0.75), (1.25, 1.75)):
        ratios = np.concatenate([kernels.sandwich_ratio(xs, s, kernels.riesz_kernel(xs, s, 1)) for s in pair])
        spread = float(ratios.max() / ratios.min()) if ratios.min() > 0 else math.inf
        checks.append(_below(f"sandwich ratio spread sigma in {pair}", spread, 100.0))
    for s in (0.25, 0.75, 1.25, 1.75):
        checks.append(_below(f"odd moment sigma={s}", abs(kernels.odd_moment(s, 1)), 1e-10))
    return checks


def _extension_test_field() -> GridField:
    return GridField.from_function(GridSpec(1, 16), lambda x: 0.4 + np.cos(x) + 0.5 * np.sin(2 * x) - 0.25 * np.cos(3 * x))


def extension_checks() -> list[Check]:
    checks = [_below("mu_1/2 = -1", abs(extension.mu_gamma(0.5) + 1), 1e-12)]
    worst = 0.0
    for lam in (1.0, 2.0, 4.0, 9.0, 25.0):
        for y in (1e-3, 0.1, 0.5, 1.0, 3.0):
            worst = max(worst, abs(extension.extension_multiplier(lam, y, 0.5) - math.exp(-y * math.sqrt(lam))))
    checks.append(_below("gamma=1/2 multiplier vs exp(-y sqrt(lam))", worst, 1e-10))
    F = to_fourier(_extension_test_field())
    for gamma in (0.3, 0.5, 0.7, 1.4, 2.6):
        sl = extension.extension_solve(F, gamma)
        checks.append(_below(f"trace recovery gamma={gamma}", extension.neumann_trace(sl).sup_error, 1e-4))
        for y in (0.1, 1.0):
            checks.append(_below(f"pde residual gamma={gamma} y={y}", extension.pde_residual(sl, y), 1e-6))
    for sigma in (0.6, 1.0):
        gamma = sigma / 2
        sl = extension.extension_solve(F, gamma)
        lam = F.norm2()
        ref = abs(extension.mu_gamma(gamma)) * math.sqrt(2 * math.pi) * math.sqrt(
            float(np.sum(np.abs(F.coeffs) ** 2 * lam**sigma)))
        checks.append(_below(f"L2 trace limit sigma={sigma}", abs(extension.l2_trace_limit(sl, sigma) - ref), 1e-4))
    return checks


def regularity_checks() -> list[Check]:
    checks = []
    m = 64
    closed = {1: 0.5**0.5 * math.exp(-0.5), 2: 4 * (1 / 8) ** 0.5 * math.exp(-0.5)}
    for nu, value in closed.items():
        est = regularity.heat_lambda_seminorm(_cos(nu, m), 1.0).value
        checks.append(_below(f"heat seminorm cos{nu}x beta=1 vs closed form (rel)", abs(est / value - 1), 0.01))
    for beta in (1.0, 1.5):
        base = regularity.heat_lambda_seminorm(_cos(1, m), beta).value
        worst = max(abs(regularity.heat_lambda_seminorm(_cos(nu, m), beta).value / (nu**beta * base) - 1)
                    for nu in range(2, 9))
        checks.append(_below(f"nu^beta scaling beta={beta} (rel)", worst, 0.02))
    ratios = [np.divide(*regularity.equivalence_scan(_cos(nu, m), 1.0, 1, 2)) for nu in range(1, 9)]
    checks.append(_below("equivalence ratio spread k=1,l=2", max(ratios) / min(ratios), 10.0))
    transfer = [regularity.transfer_ratio(_cos(nu, m), s, 1.5) for nu in range(1, 9) for s in (0.3, 0.9)]
    checks.append(_below("transfer ratio spread", max(transfer) / min(transfer), 50.0))
    fields = [_cos(nu, m) for nu in (1, 2, 5)]
    fields.append(random_bandlimited(GridSpec(1, 64), seed=3))
    fields.append(random_bandlimited(GridSpec(2, 16), seed=4))
    gap = max(regularity.zygmund_seminorm(f).value - 2 * regularity.holder_seminorm(f, 0, 1.0).value for f in fields)
    checks.append(_below("zygmund - 2 lipschitz", gap, 1e-12))
    return checks


# ---------------------------------------------------------------- mutation


MUTABLE_CONSTANTS = ("riesz_prefactor", "c_sigma", "mu_gamma")


@contextlib.contextmanager
def mutated(name: str, factor: float = 1.01):
    """Temporarily scale one analytic constant by ``factor``."""
    if name == "riesz_prefactor":
        original = kernels.riesz_prefactor

        def patched(sigma, n):
            c = original(sigma, n)
            return kernels.RieszConstant(c.n, c.sigma, c.value * factor)

        module = kernels
    elif name == "c_sigma":
        original = kernels.c_sigma
        patched = lambda sigma: original(sigma) * factor  # noqa: E731
        module = kernels
    elif name == "mu_gamma":
        original = extension.mu_gamma
        patched = lambda gamma: original(gamma) * factor  # noqa: E731
        module = extension
    else:
        raise InputError(f"unknown constant {name!r}; choose from {MUTABLE_CONSTANTS}")
    setattr(module, name, patched)
    try:
        yield
    finally:
        setattr(module, name, original)


def mutation_sensitivity() -> list[Check]:
    """Each 1% perturbation must make one of criteria 1, 3, 4, 7 fail (cheapest tried first)."""
    checks = []
    for name in MUTABLE_CONSTANTS:
        caught = None
        with mutated(name, 1.01):
            for number in (3, 4, 7, 1):
                if not all(c.passed for c in CRITERIA[number].run()):
                    caught = number
                    break
        checks.append(Check(f"1% change of {name} detected (criterion {caught})", caught is not None,
                            float(caught or 0), 0.0))
    return checks


# ---------------------------------------------------------------- registry


@dataclass(frozen=True)
class Criterion:
    number: int
    topic: str
    tags: tuple
    func: Callable[[], list]

    def run(self) -> list[Check]:
        try:
            return self.func()
        except Exception as exc:  # a crash is a failed criterion, with the reason kept
            return [Check(f"raised {type(exc).__name__}: {exc}", False, math.nan, 0.0)]


CRITERIA = {
    1: Criterion(1, "spectral-equivalence", ("pointwise", "spectral"), spectral_equivalence),
    2: Criterion(2, "heat-kernel-duality", ("kernels", "heat"), heat_duality),
    3: Criterion(3, "riesz-closed-form", ("kernels", "riesz"), riesz_closed_form),
    4: Criterion(4, "constants", ("kernels", "constants"), constants),
    5: Criterion(5, "limits", ("pointwise", "limits"), limits),
    6: Criterion(6, "kernel-bounds", ("kernels", "riesz"), kernel_bounds),
    7: Criterion(7, "extension", ("extension",), extension_checks),
    8: Criterion(8, "regularity", ("regularity",), regularity_checks),
    9: Criterion(9, "mutation", ("mutation",), mutation_sensitivity),
}


def select(filter_text: str | None) -> list[Criterion]:
    if not filter_text:
        return list(CRITERIA.values())
    key = filter_text.strip().lower()
    return [c for c in CRITERIA.values()
            if key == str(c.number) or key in c.topic or any(key == t for t in c.tags)]


def run(criteria: Iterable[Criterion], echo: Callable[[str], None] = print) -> dict:
    """Run criteria, echoing one line per check and one summary line per criterion."""
    summary = {}
    for crit in criteria:
        checks = crit.run()
        for c in checks:
            echo(c.line(crit.number, crit.topic))
        ok = all(c.passed for c in checks)
        echo(f"criterion {crit.number} {crit.topic}: {'PASS' if ok else 'FAIL'}")
        summary[crit.number] = {"topic": crit.topic, "passed": ok,
                                "checks": [{"name": c.name, "passed": c.passed, "value": c.value,
                                            "threshold": c.threshold} for c in checks]}
    return summary
