"""Command-line front end.

Exit codes: 0 success, 1 acceptance failure, 2 invalid configuration,
3 numerical failure. Every report embeds the resolved configuration and the
library version; no timestamps, so reruns are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np
import tomli

from . import __version__, acceptance, extension, kernels, pointwise, regularity, spectral
from .errors import FractorusError, InputError, NumericalError
from .fields import to_fourier
from .io import builtin_field, field_from_csv, field_to_csv, rows_to_csv

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

ROUTES = ("spectral", "pointwise", "heat-integral", "poisson-1d")

# defaults applied after the config file, so flags > file > defaults
DEFAULTS = {
    "dim": 1, "M": 64, "f": "cos2x", "input": None, "seed": 0, "format": "json", "output": None,
    "sigma": 0.5, "route": "spectral", "kind": "riesz", "x": [math.pi / 2], "sigmas": None, "ts": [0.1, 1.0],
    "target": "zero", "include_above": False, "gamma": 0.5, "y_min": 1e-4, "y_max": 4.0, "y_count": 40,
    "residual_y": [0.1, 1.0], "measure": "heat-lambda", "beta": 1.0, "k": 0, "alpha": 1.0, "ell": 2,
    "family": None, "filter": None, "mutate": None,
}


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fractorus", description="Fractional Laplacian experiments on the torus.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, field_input=True):
        sp.add_argument("--config", type=Path, help="TOML file with default parameters")
        sp.add_argument("--format", choices=("json", "csv"))
        sp.add_argument("--output", type=Path, help="write the report here instead of stdout")
        if field_input:
            sp.add_argument("--dim", type=int)
            sp.add_argument("--M", type=int, help="grid points per axis")
            sp.add_argument("--f", help="builtin field: const, cos<N>x, sin<N>x, cos_x1_cos_x2, gaussian, random")
            sp.add_argument("--input", type=Path, help="CSV field (x1..xn,value) instead of --f")
            sp.add_argument("--seed", type=int)

    sp = sub.add_parser("apply", help="apply (-Delta)^{sigma/2} by one route or compare all routes")
    common(sp)
    sp.add_argument("--sigma", type=float)
    sp.add_argument("--route", choices=ROUTES + ("all",))

    sp = sub.add_parser("kernel-table", help="tabulate heat, Riesz or Poisson kernels")
    common(sp, field_input=False)
    sp.add_argument("--kind", choices=("heat", "riesz", "poisson", "riesz-poisson"))
    sp.add_argument("--dim", type=int)
    sp.add_argument("--x", type=_floats, help="comma-separated points (n=1) or coordinates flattened (n>1)")
    sp.add_argument("--sigmas", type=_floats)
    sp.add_argument("--ts", type=_floats)

    sp = sub.add_parser("limits", help="sigma -> 0 or sigma -> 2 scans")
    common(sp)
    sp.add_argument("--target", choices=("zero", "two"))
    sp.add_argument("--sigmas", type=_floats)
    sp.add_argument("--include-above", dest="include_above", action="store_true", default=None)

    sp = sub.add_parser("extension", help="extension problem and weighted trace recovery")
    common(sp)
    sp.add_argument("--gamma", type=float)
    sp.add_argument("--y-min", dest="y_min", type=float)
    sp.add_argument("--y-max", dest="y_max", type=float)
    sp.add_argument("--y-count", dest="y_count", type=int)
    sp.add_argument("--residual-y", dest="residual_y", type=_floats)

    sp = sub.add_parser("regularity", help="seminorm estimates and family scans")
    common(sp)
    sp.add_argument("--measure", choices=("holder", "zygmund", "heat-lambda", "poisson-lambda", "equivalence", "transfer"))
    sp.add_argument("--beta", type=float)
    sp.add_argument("--k", type=int)
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--ell", type=int)
    sp.add_argument("--sigma", type=float)
    sp.add_argument("--family", help="comma-separated builtin names; produces one row per member")

    sp = sub.add_parser("selftest", help="run the acceptance suite")
    sp.add_argument("--filter", help="criterion number, topic or tag (e.g. kernels)")
    sp.add_argument("--mutate", help="NAME[:FACTOR] perturbs riesz_prefactor, c_sigma or mu_gamma")
    sp.add_argument("--output", type=Path)
    return p


def resolve_config(args: argparse.Namespace) -> dict:
    """Merge defaults, the TOML file and explicit flags (flags win)."""
    cfg = dict(DEFAULTS)
    path = getattr(args, "config", None)
    if path is not None:
        try:
            with open(path, "rb") as fh:
                data = tomli.load(fh)
        except (OSError, tomli.TOMLDecodeError) as exc:
            raise InputError(f"cannot read config {path}: {exc}") from exc
        section = data.get(args.command, data)
        unknown = set(section) - set(DEFAULTS)
        if unknown:
            raise InputError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(section)
    for key, value in vars(args).items():
        if key in ("command", "config") or value is None:
            continue
        cfg[key] = value
    for key in ("input", "output"):
        if cfg.get(key) is not None:
            cfg[key] = str(cfg[key])
    return cfg


def _field(cfg: dict):
    if cfg["input"]:
        return field_from_csv(cfg["input"])
    return builtin_field(cfg["f"], int(cfg["dim"]), int(cfg["M"]), int(cfg["seed"]))


def _route(f, sigma: float, route: str):
    if route == "spectral":
        return spectral.frac_laplacian_spectral(f, sigma)
    if route == "pointwise":
        return pointwise.frac_lap_pointwise_field(f, sigma)
    if route == "heat-integral":
        return pointwise.semigroup_formula_field(f, sigma)
    if route == "poisson-1d":
        return pointwise.poisson_formula_field_1d(f, sigma)
    raise InputError(f"unknown route {route!r}")


def cmd_apply(cfg: dict) -> tuple[int, dict, str | None]:
    f = _field(cfg)
    sigma = float(cfg["sigma"])
    if cfg["route"] != "all":
        out = _route(f, sigma, cfg["route"])
        report = {"field": out.values.ravel().tolist(), "sup_norm": out.sup_norm()}
        return EXIT_OK, report, field_to_csv(out)
    routes = [r for r in ROUTES if r != "poisson-1d" or f.grid.dim == 1]
    results = {r: _route(f, sigma, r) for r in routes}
    ref = results["spectral"]
    rows = [{"route": r, "sup_diff_vs_spectral": float(np.max(np.abs(v.values - ref.values)))} for r, v in results.items()]
    worst = max(float(np.max(np.abs(a.values - b.values))) for a in results.values() for b in results.values())
    report = {"comparison": rows, "max_inter_route_discrepancy": worst, "field": ref.values.ravel().tolist()}
    return EXIT_OK, report, rows_to_csv(rows)


def cmd_kernel_table(cfg: dict) -> tuple[int, dict, str | None]:
    n = int(cfg["dim"])
    xs = np.asarray(cfg["x"], dtype=float)
    if n > 1:
        if xs.size % n:
            raise InputError("--x must list n coordinates per point")
        xs = xs.reshape(-1, n)
    sigmas = cfg["sigmas"] or [0.5]
    rows = kernels.kernel_table(cfg["kind"], xs, sigmas, cfg["ts"], n)
    return EXIT_OK, {"rows": rows}, rows_to_csv(rows)


def cmd_limits(cfg: dict) -> tuple[int, dict, str | None]:
    f = _field(cfg)
    if cfg["target"] == "zero":
        report = pointwise.limit_zero_scan(f, cfg["sigmas"] or [0.5, 0.1, 0.01, 0.001])
    else:
        report = pointwise.limit_two_scan(f, cfg["sigmas"] or [1.5, 1.9, 1.99, 1.999], bool(cfg["include_above"]))
    monotone = report.monotone_toward_endpoint()
    body = {**report.to_dict(), "monotone": monotone}
    return (EXIT_OK if monotone else EXIT_FAIL), body, rows_to_csv(report.to_rows())


def cmd_extension(cfg: dict) -> tuple[int, dict, str | None]:
    f = _field(cfg)
    ys = np.geomspace(float(cfg["y_min"]), float(cfg["y_max"]), int(cfg["y_count"]))
    sl = extension.extension_solve(to_fourier(f), float(cfg["gamma"]), ys)
    trace = extension.neumann_trace(sl)
    residuals = [{"y": float(y), "residual": extension.pde_residual(sl, float(y))} for y in cfg["residual_y"]]
    body = {"trace": trace.to_dict(), "residuals": residuals}
    rows = [{"y": y, "sup_error": e} for y, e in zip(trace.y_sequence, trace.error_sequence)]
    return EXIT_OK, body, rows_to_csv(rows, {"mu_gamma": trace.mu_gamma, "sup_error": trace.sup_error})


def _measure(f, cfg: dict) -> dict:
    m = cfg["measure"]
    if m == "holder":
        return regularity.holder_seminorm(f, int(cfg["k"]), float(cfg["alpha"])).to_dict()
    if m == "zygmund":
        return regularity.zygmund_seminorm(f).to_dict()
    if m == "heat-lambda":
        return regularity.heat_lambda_seminorm(f, float(cfg["beta"])).to_dict()
    if m == "poisson-lambda":
        return regularity.poisson_lambda_seminorm_1d(f, float(cfg["beta"])).to_dict()
    if m == "equivalence":
        a, b = regularity.equivalence_scan(f, float(cfg["beta"]), int(cfg["k"]), int(cfg["ell"]))
        return {"kind": "equivalence", "value": a, "value_ell": b, "ratio": a / b if b else None}
    ratio = regularity.transfer_ratio(f, float(cfg["sigma"]), float(cfg["beta"]))
    return {"kind": "transfer", "value": ratio, "ratio": ratio}


def cmd_regularity(cfg: dict) -> tuple[int, dict, str | None]:
    members = [m.strip() for m in cfg["family"].split(",")] if cfg["family"] else [cfg["f"]]
    rows, reports = [], []
    for name in members:
        f = builtin_field(name, int(cfg["dim"]), int(cfg["M"]), int(cfg["seed"])) if cfg["family"] else _field(cfg)
        rep = _measure(f, cfg)
        reports.append({"member": name, **rep})
        rows.append({"family_member": name, "beta": cfg["beta"], "sigma": cfg["sigma"],
                     "value": rep["value"], "ratio": rep.get("ratio")})
    return EXIT_OK, {"reports": reports}, rows_to_csv(rows)


def cmd_selftest(cfg: dict, echo=print) -> tuple[int, dict, str | None]:
    chosen = acceptance.select(cfg["filter"])
    if not chosen:
        raise InputError(f"no criterion matches filter {cfg['filter']!r}")
    if cfg["mutate"]:
        name, _, factor = cfg["mutate"].partition(":")
        with acceptance.mutated(name, float(factor) if factor else 1.01):
            summary = acceptance.run(chosen, echo)
    else:
        summary = acceptance.run(chosen, echo)
    echo("")
    echo("criterion  topic                  result")
    for number, item in summary.items():
        echo(f"{number:>9}  {item['topic']:<22} {'PASS' if item['passed'] else 'FAIL'}")
    ok = all(item["passed"] for item in summary.values())
    return (EXIT_OK if ok else EXIT_FAIL), {"criteria": summary}, None


COMMANDS = {"apply": cmd_apply, "kernel-table": cmd_kernel_table, "limits": cmd_limits,
            "extension": cmd_extension, "regularity": cmd_regularity, "selftest": cmd_selftest}


def _emit(text: str, output) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve_config(args)
        if args.command == "selftest":
            echo = (lambda s: None) if cfg.get("output") else print
            code, body, _ = cmd_selftest(cfg, echo)
            if cfg.get("output"):
                _emit(json.dumps(body, indent=2, sort_keys=True) + "\n", cfg["output"])
            return code
        code, body, csv_text = COMMANDS[args.command](cfg)
    except InputError as exc:
        sys.stderr.write(json.dumps({"error": "invalid configuration", "detail": str(exc)}) + "\n")
        return EXIT_CONFIG
    except NumericalError as exc:
        diag = {"error": type(exc).__name__, "detail": str(exc)}
        if getattr(exc, "sequence", None) is not None:
            diag["sequence"] = list(map(float, exc.sequence))
        sys.stderr.write(json.dumps(diag) + "\n")
        return EXIT_NUMERIC
    except FractorusError as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "detail": str(exc)}) + "\n")
        return EXIT_NUMERIC
    if cfg["format"] == "csv" and csv_text is not None:
        _emit(csv_text, cfg["output"])
    else:
        report = {"command": args.command, "version": __version__, "config": cfg, "result": body}
        _emit(json.dumps(report, indent=2, sort_keys=True, default=float) + "\n", cfg["output"])
    return code


if __name__ == "__main__":
    sys.exit(main())
