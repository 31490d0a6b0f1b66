"""CSV formats and the flat key=value config file.

Headers are normative: readers validate them byte-for-byte, writers emit
them exactly. Floats are written with 17 significant digits so a write/read
round trip reproduces every double bit-exactly.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .mesh import Mesh

FLOAT_FMT = "%.17g"

STATIONS_HEADER = ["x_m", "y_m", "z_m"]
DATA_HEADER = ["x_m", "y_m", "z_m", "gz_mgal", "std_mgal"]
MODEL_HEADER = ["i", "j", "k", "x_m", "y_m", "z_m", "rho_gcc"]
LOG_HEADER = ["iter", "alpha", "chi2", "re", "seconds"]
SPECTRUM_HEADER = ["index", "sigma"]
COMPARE_HEADER = ["solver", "subspace", "re", "k", "seconds"]
UPRE_HEADER = ["alpha", "upre"]


def _fmt(x) -> str:
    return FLOAT_FMT % float(x)


def _write_rows(path, header, rows):
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def _read_rows(path, header):
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            got = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file, expected header {header}")
        if got != header:
            raise ValueError(f"{path}: header {got} does not match {header}")
        return [row for row in reader if row]


def write_stations(path, coords):
    coords = np.asarray(coords, dtype=float)
    _write_rows(path, STATIONS_HEADER, ([_fmt(v) for v in row] for row in coords))


def read_stations(path) -> np.ndarray:
    rows = _read_rows(path, STATIONS_HEADER)
    return np.array([[float(v) for v in row] for row in rows])


def write_data(path, coords, gz, std):
    coords = np.asarray(coords, dtype=float)
    rows = (
        [_fmt(c) for c in coords[i]] + [_fmt(gz[i]), _fmt(std[i])]
        for i in range(coords.shape[0])
    )
    _write_rows(path, DATA_HEADER, rows)


def read_data(path):
    rows = _read_rows(path, DATA_HEADER)
    arr = np.array([[float(v) for v in row] for row in rows])
    return arr[:, :3], arr[:, 3], arr[:, 4]


def write_model(path, mesh: Mesh, rho):
    """One row per cell in flat-index order with grid indices and centers."""
    rho = np.asarray(rho, dtype=float)
    if rho.shape != (mesh.n,):
        raise ValueError(f"model must have shape ({mesh.n},), got {rho.shape}")
    g = mesh.cell_grid()
    c = mesh.cell_centers()
    rows = (
        [str(g[f, 0]), str(g[f, 1]), str(g[f, 2])]
        + [_fmt(c[f, 0]), _fmt(c[f, 1]), _fmt(c[f, 2]), _fmt(rho[f])]
        for f in range(mesh.n)
    )
    _write_rows(path, MODEL_HEADER, rows)


def read_model(path):
    """Returns (ijk int array, centers, rho) in file row order."""
    rows = _read_rows(path, MODEL_HEADER)
    ijk = np.array([[int(r[0]), int(r[1]), int(r[2])] for r in rows])
    centers = np.array([[float(r[3]), float(r[4]), float(r[5])] for r in rows])
    rho = np.array([float(r[6]) for r in rows])
    return ijk, centers, rho


def write_log(path, records):
    rows = (
        [str(r.k), _fmt(r.alpha), _fmt(r.chi2), _fmt(r.re), _fmt(r.seconds)]
        for r in records
    )
    _write_rows(path, LOG_HEADER, rows)


def read_log(path):
    """Returns a dict of column arrays keyed by the normative header names."""
    rows = _read_rows(path, LOG_HEADER)
    cols = np.array([[float(v) for v in row] for row in rows])
    if cols.size == 0:
        cols = cols.reshape(0, len(LOG_HEADER))
    return {name: cols[:, i] for i, name in enumerate(LOG_HEADER)}


def write_spectrum(path, sigma):
    rows = ([str(i + 1), _fmt(s)] for i, s in enumerate(np.asarray(sigma)))
    _write_rows(path, SPECTRUM_HEADER, rows)


def read_spectrum(path) -> np.ndarray:
    rows = _read_rows(path, SPECTRUM_HEADER)
    return np.array([float(r[1]) for r in rows])


def write_compare(path, rows_in):
    """rows_in: iterable of (solver, subspace, re, k, seconds)."""
    rows = (
        [str(solver), str(int(sub)), _fmt(re), str(int(k)), _fmt(sec)]
        for solver, sub, re, k, sec in rows_in
    )
    _write_rows(path, COMPARE_HEADER, rows)


def read_compare(path):
    rows = _read_rows(path, COMPARE_HEADER)
    return [
        (r[0], int(r[1]), float(r[2]), int(r[3]), float(r[4])) for r in rows
    ]


def write_upre(path, grid, values):
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=float)
    if grid.shape != values.shape:
        raise ValueError("grid and values must align")
    rows = ([_fmt(a), _fmt(u)] for a, u in zip(grid, values))
    _write_rows(path, UPRE_HEADER, rows)


def read_upre(path):
    rows = _read_rows(path, UPRE_HEADER)
    arr = np.array([[float(a), float(u)] for a, u in rows])
    if arr.size == 0:
        arr = arr.reshape(0, 2)
    return arr[:, 0], arr[:, 1]


# --------------------------------------------------------------------- config

#: every config key with its type and default (None = required)
CONFIG_SCHEMA = {
    "case": (str, None),
    "nx": (int, None),
    "ny": (int, None),
    "nz": (int, None),
    "dx": (float, None),
    "dy": (float, None),
    "dz": (float, None),
    "origin_x": (float, 0.0),
    "origin_y": (float, 0.0),
    "origin_z": (float, 0.0),
    "station_z": (float, 0.0),
    "noise_a": (float, 0.02),
    "noise_b": (float, 0.002),
    "noise_seed": (int, 0),
    "rho_min": (float, 0.0),
    "rho_max": (float, 1.0),
    "depth_beta": (float, 0.8),
    "reweight_ref": (str, "step"),
    "memory_cap_gb": (float, 8.0),
}

REWEIGHT_CHOICES = ("step", "apriori")


def write_config(path, cfg: dict):
    unknown = set(cfg) - set(CONFIG_SCHEMA)
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    lines = ["# experiment configuration: flat key = value, '#' starts a comment"]
    for key in CONFIG_SCHEMA:
        if key in cfg:
            val = cfg[key]
            lines.append(f"{key} = {_fmt(val) if isinstance(val, float) else val}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_config(path) -> dict:
    """Parse, type-check against the schema, fill defaults, reject unknowns."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = (part.strip() for part in line.partition("="))
        if key not in CONFIG_SCHEMA:
            raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
        if key in out:
            raise ValueError(f"{path}:{lineno}: duplicate config key {key!r}")
        typ, _ = CONFIG_SCHEMA[key]
        try:
            out[key] = typ(value)
        except ValueError:
            raise ValueError(
                f"{path}:{lineno}: cannot parse {value!r} as {typ.__name__}"
            ) from None
    for key, (_, default) in CONFIG_SCHEMA.items():
        if key not in out:
            if default is None:
                raise ValueError(f"{path}: missing required config key {key!r}")
            out[key] = default
    if out["reweight_ref"] not in REWEIGHT_CHOICES:
        raise ValueError(
            f"{path}: reweight_ref must be one of {REWEIGHT_CHOICES}, "
            f"got {out['reweight_ref']!r}"
        )
    return out


def mesh_from_config(cfg: dict) -> Mesh:
    return Mesh(
        nx=cfg["nx"],
        ny=cfg["ny"],
        nz=cfg["nz"],
        dx=cfg["dx"],
        dy=cfg["dy"],
        dz=cfg["dz"],
        origin=(cfg["origin_x"], cfg["origin_y"], cfg["origin_z"]),
    )
