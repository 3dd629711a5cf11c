import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from fractorus.fields import GridField, GridSpec

settings.register_profile(
    "repo", max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")


def cos_field(nu: int, m: int = 32, dim: int = 1) -> GridField:
    return GridField.from_function(GridSpec(dim, m), lambda *x: np.cos(nu * x[0]))


def sup_diff(a, b) -> float:
    va = a.values if hasattr(a, "values") else np.asarray(a)
    vb = b.values if hasattr(b, "values") else np.asarray(b)
    return float(np.max(np.abs(va - vb)))


@pytest.fixture
def tau():
    return 2 * math.pi


@pytest.fixture(scope="session")
def brute_force_sigma1():
    """Direct sum to |nu| = 10^6 for n = 1, sigma = 1, computed once per session."""
    from fractorus.acceptance import brute_force_riesz_sigma1

    xs = math.pi * np.arange(1, 9) / 8
    return xs, brute_force_riesz_sigma1(xs)
