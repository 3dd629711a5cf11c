"""One test per acceptance criterion; each prints its pass/fail lines (run with -s to see them)."""

import pytest

from fractorus import acceptance


def _run_criterion(number):
    crit = acceptance.CRITERIA[number]
    checks = crit.run()
    for c in checks:
        print(c.line(crit.number, crit.topic))
    ok = all(c.passed for c in checks)
    print(f"criterion {crit.number} {crit.topic}: {'PASS' if ok else 'FAIL'}")
    assert checks, "criterion produced no checks"
    failed = [c.name for c in checks if not c.passed]
    assert not failed, failed


def test_criterion_1_spectral_oracle_equivalence():
    _run_criterion(1)


def test_criterion_2_heat_kernel_duality_and_mass():
    _run_criterion(2)


def test_criterion_3_riesz_closed_form_and_brute_force():
    _run_criterion(3)


def test_criterion_4_constants_and_endpoint_asymptotics():
    _run_criterion(4)


def test_criterion_5_limit_scans():
    _run_criterion(5)


def test_criterion_6_kernel_sandwich_and_moment_cancellation():
    _run_criterion(6)


def test_criterion_7_extension_trace_recovery():
    _run_criterion(7)


def test_criterion_8_regularity_seminorms():
    _run_criterion(8)


def test_criterion_9_mutation_sensitivity():
    _run_criterion(9)


@pytest.mark.parametrize("name,guard", [("riesz_prefactor", 3), ("c_sigma", 4), ("mu_gamma", 7)])
def test_each_mutation_trips_its_guard(name, guard):
    with acceptance.mutated(name, 1.01):
        assert not all(c.passed for c in acceptance.CRITERIA[guard].run())
    assert all(c.passed for c in acceptance.CRITERIA[guard].run())


def test_filter_selection():
    assert [c.number for c in acceptance.select("kernels")] == [2, 3, 4, 6]
    assert [c.number for c in acceptance.select("7")] == [7]
    assert len(acceptance.select(None)) == 9
    assert acceptance.select("nothing-matches") == []
