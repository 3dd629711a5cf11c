import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import optimize

from conftest import cos_field
from fractorus import regularity as reg
from fractorus.errors import InputError
from fractorus.fields import GridField, GridSpec
from fractorus.io import random_bandlimited

# sup_t t^{1/2} nu^2 e^{-nu^2 t} = nu (1/2)^{1/2} e^{-1/2}
HEAT_COS1 = math.sqrt(0.5) * math.exp(-0.5)
# sup_h 2 (1 - cos h) / h on (0, pi]: bounded scalar maximization, attained near h = 2.3311
ZYGMUND_COS1 = -optimize.minimize_scalar(lambda h: -2 * (1 - math.cos(h)) / h, bounds=(0.1, math.pi),
                                         method="bounded", options={"xatol": 1e-12}).fun


def _const(dim=1, m=32):
    return GridField(GridSpec(dim, m), np.full((m,) * dim, 0.7))


def test_closed_form_constants():
    assert HEAT_COS1 == pytest.approx(0.428882, abs=1e-6)
    assert 2 * HEAT_COS1 == pytest.approx(0.857764, abs=1e-6)
    assert ZYGMUND_COS1 == pytest.approx(1.449222, abs=1e-6)


# ---------------------------------------------------------------- Hölder / Zygmund


def test_holder_cos_x():
    report = reg.holder_seminorm(cos_field(1, m=64))
    assert report.value == pytest.approx(1.0, rel=0.02)
    assert report.value <= 1.0


def test_holder_cos2x():
    assert reg.holder_seminorm(cos_field(2, m=64)).value == pytest.approx(2.0, rel=0.02)


def test_holder_first_derivative_of_cos_x():
    # D cos = -sin, whose Lipschitz constant is also 1
    assert reg.holder_seminorm(cos_field(1, m=64), k=1).value == pytest.approx(1.0, rel=0.02)


def test_holder_fractional_exponent_is_larger_at_small_scales():
    f = cos_field(1, m=64)
    assert reg.holder_seminorm(f, alpha=0.5).value > reg.holder_seminorm(f, alpha=1.0).value * 0.5


def test_holder_subsampling_is_deterministic():
    f = random_bandlimited(GridSpec(2, 64), seed=1)
    a, b = reg.holder_seminorm(f, seed=3), reg.holder_seminorm(f, seed=3)
    assert a.value == b.value and a.argmax == b.argmax


@pytest.mark.parametrize("kwargs", [{"k": -1}, {"k": 1.5}, {"alpha": 0.0}, {"alpha": 1.5}])
def test_holder_validation(kwargs):
    with pytest.raises(InputError):
        reg.holder_seminorm(cos_field(1, m=8), **kwargs)


def test_zygmund_cos_x():
    report = reg.zygmund_seminorm(cos_field(1, m=256))
    assert report.value == pytest.approx(ZYGMUND_COS1, rel=1e-3)
    assert abs(report.argmax["h"][0]) == pytest.approx(2.3311, abs=0.03)


def test_zygmund_scaling_cos2x():
    assert reg.zygmund_seminorm(cos_field(2, m=256)).value == pytest.approx(2 * ZYGMUND_COS1, rel=1e-3)


def test_zygmund_bounded_by_twice_lipschitz():
    for f in [cos_field(1, m=32), cos_field(3, m=32), random_bandlimited(GridSpec(1, 32), 4),
              random_bandlimited(GridSpec(2, 16), 5)]:
        assert reg.zygmund_seminorm(f).value <= 2 * reg.holder_seminorm(f).value + 1e-12


# ---------------------------------------------------------------- semigroup seminorms


def test_heat_cos_x_beta_one():
    report = reg.heat_lambda_seminorm(cos_field(1), 1.0)
    assert report.value == pytest.approx(HEAT_COS1, rel=0.01)
    assert report.value <= HEAT_COS1
    assert report.k_used == 1


def test_heat_cos2x_beta_one():
    assert reg.heat_lambda_seminorm(cos_field(2), 1.0).value == pytest.approx(2 * HEAT_COS1, rel=0.01)


def test_poisson_examples():
    assert reg.poisson_lambda_seminorm_1d(cos_field(1), 0.5).value == pytest.approx(HEAT_COS1, rel=0.01)
    assert reg.poisson_lambda_seminorm_1d(cos_field(2), 0.5).value == pytest.approx(math.exp(-0.5), rel=0.01)


def test_poisson_rejects_2d():
    with pytest.raises(InputError):
        reg.poisson_lambda_seminorm_1d(_const(2, 8), 0.5)


@pytest.mark.parametrize("beta", [0.3, 1.0, 1.99, 2.0, 3.7])
def test_k_convention(beta):
    f = cos_field(1, m=16)
    assert reg.heat_lambda_seminorm(f, beta).k_used == math.floor(beta / 2) + 1
    assert reg.poisson_lambda_seminorm_1d(f, beta).k_used == math.floor(beta) + 1


@pytest.mark.parametrize("nu", range(1, 9))
@pytest.mark.parametrize("beta", [0.5, 1.5])
def test_heat_scaling_covariance(nu, beta):
    grid_t = np.geomspace(1e-5, 10, 400)
    value = reg.heat_lambda_seminorm(cos_field(nu), beta, grid_t).value
    assert value == pytest.approx(nu**beta * reg.heat_lambda_seminorm(cos_field(1), beta, grid_t).value, rel=0.01)


def test_report_serializes():
    data = json.loads(json.dumps(reg.heat_lambda_seminorm(cos_field(1), 1.0).to_dict()))
    assert data["kind"] == "heat_lambda(1.0)" and len(data["t_grid"]) == 60


def test_t_grid_validation():
    with pytest.raises(InputError):
        reg.heat_lambda_seminorm(cos_field(1), 1.0, [0.0, 1.0])
    with pytest.raises(InputError):
        reg.heat_lambda_seminorm(cos_field(1), -1.0)


# ---------------------------------------------------------------- vanishing iff constant


ESTIMATORS = {
    "holder": lambda f: reg.holder_seminorm(f).value,
    "zygmund": lambda f: reg.zygmund_seminorm(f).value,
    "heat": lambda f: reg.heat_lambda_seminorm(f, 1.2).value,
    "poisson": lambda f: reg.poisson_lambda_seminorm_1d(f, 0.8).value,
}


@pytest.mark.parametrize("name", sorted(ESTIMATORS))
def test_constant_fields_vanish(name):
    assert ESTIMATORS[name](_const()) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("name", sorted(ESTIMATORS))
@settings(max_examples=10)
@given(seed=st.integers(0, 10_000))
def test_nonconstant_fields_do_not_vanish(name, seed):
    f = random_bandlimited(GridSpec(1, 16), seed)
    assert ESTIMATORS[name](f) > 1e-6


# ---------------------------------------------------------------- equivalence, inclusion, transfer


def test_equivalence_examples():
    a, b = reg.equivalence_scan(cos_field(1), 1.0, 1, 2)
    assert a > 0 and b > 0
    assert reg.equivalence_scan(_const(), 1.0, 1, 2) == (0.0, 0.0)
    with pytest.raises(InputError):
        reg.equivalence_scan(cos_field(1), 2.0, 1, 2)


def test_equivalence_ratio_stable_over_family():
    ratios = []
    for nu in range(1, 9):
        a, b = reg.equivalence_scan(cos_field(nu), 1.0, 1, 2)
        ratios.append(a / b)
    assert max(ratios) / min(ratios) < 10


def test_inclusion_ratio_bounded():
    t_small = [t for t in reg.DEFAULT_T_GRID if t <= 1.0]
    ratios = []
    for f in [cos_field(nu) for nu in range(1, 9)] + [random_bandlimited(GridSpec(1, 32), s) for s in range(4)]:
        scale = f.sup_norm()
        g = GridField(f.grid, f.values / scale)
        low = reg.heat_lambda_seminorm(g, 0.7, t_small).value
        high = reg.heat_lambda_seminorm(g, 1.6).value
        ratios.append(low / (high + g.sup_norm()))
    assert max(ratios) < 5


def test_transfer_examples():
    r = reg.transfer_ratio(cos_field(1), 0.5, 1.0)
    assert 0 < r < math.inf
    assert reg.transfer_ratio(_const(), 0.5, 1.0) == 0.0
    with pytest.raises(InputError):
        reg.transfer_ratio(cos_field(1), 1.2, 1.0)


def test_transfer_ratio_bounded_over_family():
    ratios = [reg.transfer_ratio(cos_field(nu), sigma, 1.5) for nu in range(1, 9) for sigma in (0.3, 0.9)]
    assert max(ratios) / min(ratios) < 50
