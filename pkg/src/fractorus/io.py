"""Builtin test fields and file formats.

Field CSV: an optional first line ``# {json metadata}``, then a header
``x1,...,xn,value`` and one row per grid point in C order.
Fourier JSON: ``{"dim": n, "mode_radius": N, "coeffs": [[nu_1, ..., nu_n, re, im], ...]}``.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
import re
from pathlib import Path

import numpy as np

from .errors import InputError
from .fields import FourierField, GridField, GridSpec, to_grid


def builtin_field(name: str, dim: int, points_per_axis: int, seed: int = 0) -> GridField:
    """Named test fields.

    ``const``, ``cos<N>x`` / ``sin<N>x`` (first coordinate, ``cosx`` means N=1),
    ``cos_x1_cos_x2``, ``gaussian`` (periodized, width 0.5), ``random``
    (band-limited to a quarter of the grid, fixed seed).
    """
    grid = GridSpec(dim, points_per_axis)
    match = re.fullmatch(r"(cos|sin)(\d*)x", name)
    if name == "const":
        return GridField(grid, np.ones(grid.shape))
    if match:
        nu = int(match.group(2) or 1)
        trig = np.cos if match.group(1) == "cos" else np.sin
        return GridField.from_function(grid, lambda *x: trig(nu * x[0]))
    if name == "cos_x1_cos_x2":
        if dim < 2:
            raise InputError("cos_x1_cos_x2 needs dim >= 2")
        return GridField.from_function(grid, lambda *x: np.cos(x[0]) * np.cos(x[1]))
    if name == "gaussian":
        def periodized(*x):
            total = np.zeros(np.shape(x[0]))
            for shift in np.ndindex(*([5] * dim)):
                r2 = sum((xi - 2 * math.pi * (s - 2)) ** 2 for xi, s in zip(x, shift))
                total = total + np.exp(-r2 / (2 * 0.5**2))
            return total
        return GridField.from_function(grid, periodized)
    if name == "random":
        return random_bandlimited(grid, seed)
    raise InputError(f"unknown builtin field {name!r}")


def random_bandlimited(grid: GridSpec, seed: int = 0, radius: int | None = None) -> GridField:
    """Real field with random coefficients on modes |nu_i| <= radius (default M/4)."""
    radius = grid.points_per_axis // 4 if radius is None else radius
    rng = np.random.default_rng(seed)
    shape = (2 * radius + 1,) * grid.dim
    coeffs = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    coeffs = 0.5 * (coeffs + np.conj(np.flip(coeffs)))
    F = FourierField(grid.dim, radius, coeffs / coeffs.size)
    return to_grid(F, grid)


def field_to_csv(f: GridField, metadata: dict | None = None) -> str:
    buf = _io.StringIO()
    if metadata is not None:
        buf.write("# " + json.dumps(metadata, sort_keys=True) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([f"x{a + 1}" for a in range(f.grid.dim)] + ["value"])
    coords = np.stack([c.ravel() for c in f.grid.coords()], axis=1)
    for pt, v in zip(coords, f.values.ravel()):
        writer.writerow([repr(float(c)) for c in pt] + [repr(float(v))])
    return buf.getvalue()


def field_from_csv(path: str | Path) -> GridField:
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip() and not ln.startswith("#")]
    rows = list(csv.reader(lines))
    header, body = rows[0], np.array(rows[1:], dtype=float)
    dim = len(header) - 1
    if dim < 1 or body.ndim != 2 or body.shape[1] != dim + 1:
        raise InputError("CSV needs columns x1..xn,value")
    m = round(len(body) ** (1.0 / dim))
    if m**dim != len(body):
        raise InputError("row count is not M^n")
    grid = GridSpec(dim, m)
    expected = np.stack([c.ravel() for c in grid.coords()], axis=1)
    if not np.allclose(body[:, :dim], expected, atol=1e-9):
        raise InputError("CSV coordinates do not match the standard grid ordering")
    return GridField(grid, body[:, dim].reshape(grid.shape))


def fourier_to_json(F: FourierField) -> dict:
    modes = np.stack([k.ravel() for k in F.wave_vectors()], axis=1)
    flat = F.coeffs.ravel()
    keep = np.abs(flat) > 0
    return {"dim": F.dim, "mode_radius": F.mode_radius,
            "coeffs": [[*map(int, nu), float(c.real), float(c.imag)] for nu, c in zip(modes[keep], flat[keep])]}


def fourier_from_json(data: dict) -> FourierField:
    dim, radius = int(data["dim"]), int(data["mode_radius"])
    entries = {tuple(int(v) for v in row[:dim]): complex(row[dim], row[dim + 1]) for row in data["coeffs"]}
    return FourierField.from_modes(dim, radius, entries)


def rows_to_csv(rows: list[dict], metadata: dict | None = None) -> str:
    buf = _io.StringIO()
    if metadata is not None:
        buf.write("# " + json.dumps(metadata, sort_keys=True) + "\n")
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return buf.getvalue()
