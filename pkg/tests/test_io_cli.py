import json
import math

import numpy as np
import pytest

from fractorus import cli
from fractorus.errors import InputError
from fractorus.fields import FourierField, GridField, GridSpec, to_fourier
from fractorus.io import (builtin_field, field_from_csv, field_to_csv, fourier_from_json, fourier_to_json,
                          random_bandlimited, rows_to_csv)


def _run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _json(capsys, *argv):
    code, out, err = _run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


# ---------------------------------------------------------------- io


@pytest.mark.parametrize("dim,m", [(1, 16), (2, 8), (3, 4)])
def test_field_csv_round_trip(tmp_path, dim, m):
    f = random_bandlimited(GridSpec(dim, m), seed=dim)
    path = tmp_path / "f.csv"
    path.write_text(field_to_csv(f, {"note": "x"}))
    g = field_from_csv(path)
    assert g.grid == f.grid
    assert np.array_equal(g.values, f.values)


def test_field_csv_rejects_bad_layouts(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("x1,value\n0.1,1\n0.2,2\n0.3,3\n")
    with pytest.raises(InputError):
        field_from_csv(bad)
    ragged = tmp_path / "ragged.csv"
    ragged.write_text("x1,x2,value\n0,0,1\n0,1,1\n1,0,1\n")
    with pytest.raises(InputError):
        field_from_csv(ragged)


def test_fourier_json_round_trip():
    F = to_fourier(random_bandlimited(GridSpec(2, 8), seed=7))
    G = fourier_from_json(json.loads(json.dumps(fourier_to_json(F))))
    assert G.dim == F.dim and G.mode_radius == F.mode_radius
    assert np.allclose(G.coeffs, F.coeffs, atol=1e-15)


def test_builtin_fields():
    g = GridSpec(1, 16)
    x = g.coords()[0]
    assert np.allclose(builtin_field("cos3x", 1, 16).values, np.cos(3 * x))
    assert np.allclose(builtin_field("sinx", 1, 16).values, np.sin(x))
    assert np.all(builtin_field("const", 2, 4).values == 1.0)
    gauss = builtin_field("gaussian", 1, 32)
    assert gauss.values.max() == pytest.approx(1.0, abs=0.02)
    assert np.array_equal(builtin_field("random", 1, 16, 4).values, builtin_field("random", 1, 16, 4).values)
    with pytest.raises(InputError):
        builtin_field("cos_x1_cos_x2", 1, 8)
    with pytest.raises(InputError):
        builtin_field("nope", 1, 8)


def test_random_bandlimited_respects_radius():
    F = to_fourier(random_bandlimited(GridSpec(1, 32), seed=1))
    big = [nu for nu, c in zip(F.modes(), F.coeffs) if abs(c) > 1e-14]
    assert max(abs(v) for v in big) <= 8


def test_rows_to_csv_header_and_metadata():
    text = rows_to_csv([{"a": 1, "b": 2.5}], {"k": 1})
    assert text.splitlines() == ['# {"k": 1}', "a,b", "1,2.5"]
    assert rows_to_csv([]) == ""


# ---------------------------------------------------------------- cli: apply


def test_apply_all_routes_agree(capsys):
    report = _json(capsys, "apply", "--dim", "1", "--f", "cos2x", "--sigma", "0.5", "--route", "all")
    assert report["result"]["max_inter_route_discrepancy"] < 1e-5
    assert {r["route"] for r in report["result"]["comparison"]} == {"spectral", "pointwise", "heat-integral",
                                                                      "poisson-1d"}


def test_apply_constant_pointwise_is_zero(capsys):
    report = _json(capsys, "apply", "--f", "const", "--sigma", "1.2", "--route", "pointwise")
    assert max(abs(v) for v in report["result"]["field"]) == 0.0


def test_apply_2d_spectral(capsys):
    report = _json(capsys, "apply", "--dim", "2", "--M", "16", "--f", "cos_x1_cos_x2", "--sigma", "1.5",
                   "--route", "spectral")
    f = builtin_field("cos_x1_cos_x2", 2, 16)
    assert np.allclose(report["result"]["field"], 2**0.75 * f.values.ravel(), atol=1e-12)


def test_apply_csv_input_and_output(tmp_path, capsys):
    src = tmp_path / "in.csv"
    src.write_text(field_to_csv(builtin_field("cos2x", 1, 16)))
    out = tmp_path / "out.csv"
    code, _, _ = _run(capsys, "apply", "--input", str(src), "--sigma", "1.0", "--format", "csv",
                      "--output", str(out))
    assert code == 0
    g = field_from_csv(out)
    assert np.allclose(g.values, 2 * builtin_field("cos2x", 1, 16).values, atol=1e-12)


# ---------------------------------------------------------------- cli: other commands


def test_limits_zero_scan(capsys):
    report = _json(capsys, "limits", "--f", "cos2x", "--M", "32", "--target", "zero", "--sigmas", "0.5,0.1,0.01")
    errs = report["result"]["sup_errors"]
    assert errs == pytest.approx([2**0.5 - 1, 2**0.1 - 1, 2**0.01 - 1], abs=1e-6)
    assert report["result"]["monotone"] is True


def test_limits_two_scan_symmetric_profile(capsys):
    report = _json(capsys, "limits", "--f", "cos2x", "--M", "32", "--target", "two", "--sigmas", "1.9,1.99",
                   "--include-above")
    res = report["result"]
    assert res["sigmas"] == pytest.approx([1.9, 1.99, 2.01, 2.1])
    e = res["sup_errors"]
    # errors on each side are close to |2^sigma - 4|, roughly mirrored around 2
    assert e[0] == pytest.approx(abs(2**1.9 - 4), abs=1e-6) and e[3] == pytest.approx(2**2.1 - 4, abs=1e-6)
    assert e[1] == pytest.approx(e[2], rel=0.02)


def test_limits_constant_zero(capsys):
    report = _json(capsys, "limits", "--f", "const", "--M", "16", "--target", "zero")
    assert report["result"]["sup_errors"] == [0.0] * 4


def test_extension_command(capsys):
    report = _json(capsys, "extension", "--f", "cosx", "--M", "16", "--gamma", "0.5")
    assert report["result"]["trace"]["mu_gamma"] == pytest.approx(-1.0)
    assert report["result"]["trace"]["sup_error"] < 1e-6
    report = _json(capsys, "extension", "--f", "cos2x", "--M", "16", "--gamma", "2.6")
    assert report["result"]["trace"]["sup_error"] < 1e-4
    report = _json(capsys, "extension", "--f", "const", "--M", "8", "--gamma", "1.4")
    assert report["result"]["trace"]["sup_error"] == 0.0


def test_kernel_table_command(capsys):
    report = _json(capsys, "kernel-table", "--kind", "riesz-poisson", "--x", "0.5,1.0", "--sigmas", "0.5")
    assert len(report["result"]["rows"]) == 2


def test_regularity_family_csv(capsys):
    code, out, _ = _run(capsys, "regularity", "--measure", "heat-lambda", "--beta", "1.0", "--family",
                        "cosx,cos2x", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "family_member,beta,sigma,value,ratio"
    assert float(lines[1].split(",")[3]) == pytest.approx(math.sqrt(0.5) * math.exp(-0.5), rel=0.01)


# ---------------------------------------------------------------- cli: config, errors, determinism


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.toml"
    cfg.write_text('[apply]\nf = "cos3x"\nsigma = 1.0\nM = 16\n')
    report = _json(capsys, "apply", "--config", str(cfg))
    assert report["config"]["f"] == "cos3x" and report["config"]["sigma"] == 1.0
    assert max(report["result"]["field"]) == pytest.approx(3.0, abs=1e-12)
    report = _json(capsys, "apply", "--config", str(cfg), "--sigma", "0.5")
    assert report["config"]["sigma"] == 0.5


def test_invalid_configuration_exit_codes(tmp_path, capsys):
    assert _run(capsys, "extension", "--gamma", "2")[0] == 2
    assert _run(capsys, "apply", "--sigma", "2.5")[0] == 2
    assert _run(capsys, "apply", "--f", "nope")[0] == 2
    assert _run(capsys, "apply", "--route", "bogus")[0] == 2
    bad = tmp_path / "bad.toml"
    bad.write_text("unknown_key = 1\n")
    code, _, err = _run(capsys, "apply", "--config", str(bad))
    assert code == 2 and "unknown" in err
    assert _run(capsys, "selftest", "--filter", "no-such-topic")[0] == 2
    assert _run(capsys, "selftest", "--filter", "4", "--mutate", "bogus")[0] == 2


def test_numerical_failure_exit_code(capsys):
    code, _, err = _run(capsys, "extension", "--f", "cos3x", "--M", "16", "--gamma", "0.3", "--y-min", "0.5",
                        "--y-max", "3", "--y-count", "8")
    assert code == 3
    diag = json.loads(err)
    assert diag["error"] == "ExtrapolationError" and len(diag["sequence"]) == 8


def test_reports_are_deterministic(capsys):
    argv = ("apply", "--f", "random", "--M", "16", "--sigma", "0.7", "--route", "all")
    assert _run(capsys, *argv)[1] == _run(capsys, *argv)[1]


def test_version_embedded(capsys):
    report = _json(capsys, "apply", "--f", "cosx", "--M", "8")
    assert report["version"] == cli.__version__


# ---------------------------------------------------------------- cli: selftest


def test_selftest_filter_runs_subset(capsys):
    code, out, _ = _run(capsys, "selftest", "--filter", "kernels")
    assert code == 0
    assert "PASS" in out and "FAIL" not in out


def test_selftest_mutation_fails(capsys):
    code, out, _ = _run(capsys, "selftest", "--filter", "4", "--mutate", "c_sigma:1.01")
    assert code == 1
    assert "FAIL" in out


def test_selftest_writes_json(tmp_path, capsys):
    out = tmp_path / "self.json"
    code, stdout, _ = _run(capsys, "selftest", "--filter", "4", "--output", str(out))
    assert code == 0 and stdout == ""
    data = json.loads(out.read_text())
    assert all(item["passed"] for item in data["criteria"].values())
