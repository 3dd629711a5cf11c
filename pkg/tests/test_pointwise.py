import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import cos_field, sup_diff
from fractorus import pointwise as pw
from fractorus.errors import InputError, OffGridError, ResolutionError
from fractorus.fields import GridField, GridSpec
from fractorus.io import random_bandlimited
from fractorus.spectral import frac_laplacian_spectral

SIGMAS = (0.3, 0.7, 1.0, 1.3, 1.8)


def _prod_cos_2d(m=32):
    return GridField.from_function(GridSpec(2, m), lambda x, y: np.cos(x) * np.cos(y))


def _inner(f, g):
    return float(np.sum(f.values * g.values)) * f.grid.spacing ** f.grid.dim


# ---------------------------------------------------------------- examples


@pytest.mark.parametrize("sigma", [0.2, 1.0, 1.7])
def test_constant_field_is_annihilated_by_pointwise(sigma):
    f = GridField(GridSpec(1, 32), np.full(32, 3.5))
    assert np.max(np.abs(pw.frac_lap_pointwise_field(f, sigma).values)) == 0.0
    assert pw.frac_lap_pointwise(f, (5,), sigma) == pytest.approx(0.0, abs=1e-12)


def test_cos2x_half_order_every_grid_point():
    f = cos_field(2, m=32)
    expected = 2**0.5 * f.values
    got = np.array([pw.frac_lap_pointwise(f, (j,), 0.5) for j in range(32)])
    assert np.max(np.abs(got - expected)) < 1e-6


def test_product_cosine_2d_order_one_and_a_half():
    f = _prod_cos_2d()
    out = pw.frac_lap_pointwise_field(f, 1.5)
    assert sup_diff(out.values, 2**0.75 * f.values) < 1e-5


def test_single_point_matches_field_form_2d():
    f = random_bandlimited(GridSpec(2, 16), seed=4)
    field = pw.frac_lap_pointwise_field(f, 1.3)
    for idx in [(0, 0), (3, 11), (15, 7)]:
        assert pw.frac_lap_pointwise(f, idx, 1.3) == pytest.approx(field.values[idx], abs=1e-9)


def test_single_point_gradient_branch_odd_field():
    # sin x has a nonzero gradient, so the sigma >= 1 correction term matters pointwise
    f = GridField.from_function(GridSpec(1, 32), lambda x: np.sin(x))
    for j in (0, 8, 20):
        assert pw.frac_lap_pointwise(f, (j,), 1.4) == pytest.approx(f.values[j], abs=1e-7)


def test_three_dimensional_route():
    f = GridField.from_function(GridSpec(3, 8), lambda x, y, z: np.cos(x) * np.cos(y) * np.cos(z))
    out = pw.frac_lap_pointwise_field(f, 0.7)
    assert sup_diff(out.values, 3 ** 0.35 * f.values) < 1e-7


def test_heat_route_cos_x_any_order():
    f = cos_field(1)
    for sigma in (0.1, 0.9, 1.6):
        assert pw.semigroup_formula_eval(f, (5,), sigma) == pytest.approx(f.values[5], abs=1e-8)


def test_heat_route_cos2x_order_one():
    f = cos_field(2)
    for j in (0, 7, 13):
        assert pw.semigroup_formula_eval(f, (j,), 1.0) == pytest.approx(2 * f.values[j], abs=1e-8)


def test_poisson_route_examples():
    f = cos_field(1)
    assert pw.poisson_formula_eval_1d(f, (3,), 0.5) == pytest.approx(f.values[3], abs=1e-8)
    g = cos_field(2)
    for j in (1, 9):
        assert pw.poisson_formula_eval_1d(g, (j,), 1.5) == pytest.approx(2.828427124746190 * g.values[j], abs=1e-7)
    one = GridField(GridSpec(1, 16), np.ones(16))
    assert pw.poisson_formula_eval_1d(one, (0,), 1.2) == 0.0
    assert np.max(np.abs(pw.poisson_formula_field_1d(one, 0.4).values)) == 0.0


def test_poisson_route_rejects_2d():
    with pytest.raises(InputError):
        pw.poisson_formula_field_1d(_prod_cos_2d(8), 0.5)
    with pytest.raises(InputError):
        pw.poisson_formula_eval_1d(_prod_cos_2d(8), (0, 0), 0.5)


# ---------------------------------------------------------------- errors and config


def test_off_grid_point_rejected():
    f = cos_field(1, m=16)
    with pytest.raises(OffGridError):
        pw.frac_lap_pointwise(f, (0.123,), 0.5)
    with pytest.raises(OffGridError):
        pw.semigroup_formula_eval(f, (0.5,), 0.5)


def test_oversized_ball_raises_resolution_error():
    f = cos_field(8, m=32)
    with pytest.raises(ResolutionError):
        pw.frac_lap_pointwise_field(f, 0.5, pw.PVConfig(delta=1.2, tol=1e-8))


@pytest.mark.parametrize("kwargs", [{"delta": 2.0}, {"delta": 0.0}, {"taylor_order": 3}, {"tol": 1e-14}])
def test_config_validation(kwargs):
    with pytest.raises(InputError):
        pw.PVConfig(**kwargs)


def test_error_budget_below_tolerance():
    f = cos_field(3)
    _, budget = pw.frac_lap_pointwise_field(f, 0.8, return_budget=True)
    assert budget.taylor_remainder < 1e-7
    assert 0 < budget.delta <= 0.25 * f.grid.spacing
    assert budget.ball_correction > 0


def test_first_order_taylor_also_converges():
    f = cos_field(2)
    out = pw.frac_lap_pointwise_field(f, 0.6, pw.PVConfig(taylor_order=1))
    assert sup_diff(out.values, 2**0.6 * f.values) < 1e-6


def test_explicit_delta_respected():
    f = cos_field(1)
    _, budget = pw.frac_lap_pointwise(f, (0,), 0.5, pw.PVConfig(delta=0.01), return_budget=True)
    assert budget.delta == 0.01


# ---------------------------------------------------------------- route equivalence


@pytest.mark.parametrize("sigma", SIGMAS)
def test_all_routes_match_spectral_1d(sigma):
    f = random_bandlimited(GridSpec(1, 32), seed=11)
    ref = frac_laplacian_spectral(f, sigma).values
    assert sup_diff(pw.frac_lap_pointwise_field(f, sigma).values, ref) < 1e-5
    assert sup_diff(pw.semigroup_formula_field(f, sigma).values, ref) < 1e-5
    assert sup_diff(pw.poisson_formula_field_1d(f, sigma).values, ref) < 1e-5


@pytest.mark.parametrize("sigma", SIGMAS)
def test_routes_match_spectral_2d(sigma):
    f = random_bandlimited(GridSpec(2, 16), seed=12)
    ref = frac_laplacian_spectral(f, sigma).values
    assert sup_diff(pw.frac_lap_pointwise_field(f, sigma).values, ref) < 1e-5
    assert sup_diff(pw.semigroup_formula_field(f, sigma).values, ref) < 1e-5


def test_scalar_and_field_semigroup_routes_agree():
    f = random_bandlimited(GridSpec(1, 16), seed=2)
    field = pw.semigroup_formula_field(f, 0.9)
    pois = pw.poisson_formula_field_1d(f, 0.9)
    for j in (0, 5, 11):
        assert pw.semigroup_formula_eval(f, (j,), 0.9) == pytest.approx(field.values[j], abs=1e-9)
        assert pw.poisson_formula_eval_1d(f, (j,), 0.9) == pytest.approx(pois.values[j], abs=1e-9)


@settings(max_examples=10)
@given(seed=st.integers(0, 10_000), sigma=st.sampled_from(SIGMAS))
def test_random_bandlimited_fields_agree_across_routes(seed, sigma):
    f = random_bandlimited(GridSpec(1, 16), seed=seed)
    ref = frac_laplacian_spectral(f, sigma).values
    assert sup_diff(pw.frac_lap_pointwise_field(f, sigma).values, ref) < 1e-5
    assert sup_diff(pw.semigroup_formula_field(f, sigma).values, ref) < 1e-5


# ---------------------------------------------------------------- linearity, constants, symmetry

ROUTES = {
    "pointwise": pw.frac_lap_pointwise_field,
    "heat": pw.semigroup_formula_field,
    "poisson": pw.poisson_formula_field_1d,
}


@pytest.mark.parametrize("route", sorted(ROUTES))
@settings(max_examples=8)
@given(seed=st.integers(0, 1000), a=st.floats(-3, 3), b=st.floats(-3, 3))
def test_routes_are_linear(route, seed, a, b):
    op = ROUTES[route]
    grid = GridSpec(1, 16)
    f, g = random_bandlimited(grid, seed), random_bandlimited(grid, seed + 1)
    combo = GridField(grid, a * f.values + b * g.values)
    lhs = op(combo, 0.7, pw.PVConfig(delta=0.05)) if route == "pointwise" else op(combo, 0.7)
    if route == "pointwise":
        rf, rg = op(f, 0.7, pw.PVConfig(delta=0.05)), op(g, 0.7, pw.PVConfig(delta=0.05))
    else:
        rf, rg = op(f, 0.7), op(g, 0.7)
    assert sup_diff(lhs.values, a * rf.values + b * rg.values) < 1e-10 * (1 + abs(a) + abs(b)) * 10


@pytest.mark.parametrize("route", sorted(ROUTES))
@pytest.mark.parametrize("sigma", [0.4, 1.5])
def test_routes_annihilate_constants(route, sigma):
    f = GridField(GridSpec(1, 16), np.full(16, -2.0))
    assert np.max(np.abs(ROUTES[route](f, sigma).values)) < 1e-12


@pytest.mark.parametrize("route", sorted(ROUTES))
@pytest.mark.parametrize("sigma", [0.5, 1.2])
def test_routes_are_symmetric(route, sigma):
    grid = GridSpec(1, 16)
    f, g = random_bandlimited(grid, 21), random_bandlimited(grid, 22)
    op = ROUTES[route]
    if route == "pointwise":
        # the automatic ball radius depends on the input, so fix it to compare one operator
        cfg = pw.PVConfig(delta=0.02)
        op = lambda h, s: pw.frac_lap_pointwise_field(h, s, cfg)  # noqa: E731
    assert _inner(op(f, sigma), g) == pytest.approx(_inner(f, op(g, sigma)), abs=1e-8)


def test_pointwise_symmetric_2d():
    grid = GridSpec(2, 8)
    f, g = random_bandlimited(grid, 1), random_bandlimited(grid, 2)
    cfg = pw.PVConfig(delta=0.05)
    lhs = _inner(pw.frac_lap_pointwise_field(f, 1.1, cfg), g)
    assert lhs == pytest.approx(_inner(f, pw.frac_lap_pointwise_field(g, 1.1, cfg)), abs=1e-8)


# ---------------------------------------------------------------- limit scans


def test_zero_scan_values():
    report = pw.limit_zero_scan(cos_field(2), [0.5, 0.1, 0.001])
    assert report.sup_errors[1] == pytest.approx(2**0.1 - 1, abs=1e-6)
    assert report.sup_errors[1] == pytest.approx(0.071773, abs=1e-6)
    assert report.sup_errors[2] == pytest.approx(0.000693, abs=1e-6)
    assert report.monotone_toward_endpoint()
    assert report.endpoint == 0.0


def test_zero_scan_constant_field():
    one = GridField(GridSpec(1, 16), np.ones(16))
    assert pw.limit_zero_scan(one, [0.9, 0.5, 0.1]).sup_errors == [0.0, 0.0, 0.0]


def test_two_scan_values_both_sides():
    report = pw.limit_two_scan(cos_field(2), [1.5, 1.9, 1.99], include_above=True)
    assert report.sigmas == pytest.approx([1.5, 1.9, 1.99, 2.01, 2.1, 2.5])
    assert report.sup_errors[1] == pytest.approx(abs(2**1.9 - 4), abs=1e-6)
    # |2^1.9 - 4| = 0.26786803385..., computed independently with mpmath
    assert report.sup_errors[1] == pytest.approx(0.26786803385, abs=1e-6)
    assert report.sup_errors[4] == pytest.approx(0.287094, abs=1e-6)
    assert report.monotone_toward_endpoint()


def test_two_scan_cos_x_is_exact():
    report = pw.limit_two_scan(cos_field(1), [1.2, 1.6, 1.95])
    assert max(report.sup_errors) < 1e-7


def test_limit_scans_monotone_on_smooth_2d_field():
    f = _prod_cos_2d(16)
    assert pw.limit_zero_scan(f, [0.8, 0.4, 0.1]).monotone_toward_endpoint()
    assert pw.limit_two_scan(f, [1.2, 1.6, 1.9]).monotone_toward_endpoint()


@pytest.mark.parametrize("sigmas", [[0.1, 0.5], [0.5, 1.5], [0.5, 0.5]])
def test_zero_scan_rejects_bad_lists(sigmas):
    with pytest.raises(InputError):
        pw.limit_zero_scan(cos_field(1), sigmas)


@pytest.mark.parametrize("sigmas", [[1.9, 1.5], [0.5, 1.5], [1.5, 2.5]])
def test_two_scan_rejects_bad_lists(sigmas):
    with pytest.raises(InputError):
        pw.limit_two_scan(cos_field(1), sigmas)


def test_report_invariants_and_serialization():
    with pytest.raises(InputError):
        pw.LimitScanReport([0.5, 0.1], [1.0], "zero_limit")
    with pytest.raises(InputError):
        pw.LimitScanReport([0.5, 0.1, 0.3], [1.0, 0.5, 0.1], "zero_limit")
    report = pw.LimitScanReport([0.5, 0.1], [0.4, 0.07], "zero_limit")
    assert json.loads(json.dumps(report.to_dict())) == report.to_dict()
    assert report.to_rows() == [{"sigma": 0.5, "sup_error": 0.4}, {"sigma": 0.1, "sup_error": 0.07}]
    assert not pw.LimitScanReport([0.5, 0.1], [0.1, 0.4], "zero_limit").monotone_toward_endpoint()
    assert pw.LimitScanReport([0.5, 0.1], [0.0, 0.0], "zero_limit").monotone_toward_endpoint()
    assert not pw.LimitScanReport([0.5, 0.1], [0.2, 0.2], "zero_limit").monotone_toward_endpoint()


def test_symbol_reproduces_multiplier_for_single_modes():
    f = cos_field(5, m=32)
    out = pw.frac_lap_pointwise_field(f, 1.8)
    assert sup_diff(out.values, 5**1.8 * f.values) < 1e-5 * 5**1.8 * math.sqrt(1)
