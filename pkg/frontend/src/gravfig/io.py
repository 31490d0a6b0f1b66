"""Readers for the inversion toolkit's CSV and config outputs.

The column headers are the whole interface contract, so every reader checks
them verbatim and refuses drifted files instead of guessing.
"""

from io import StringIO
from pathlib import Path

import numpy as np

HEADERS = {
    "stations": "x_m,y_m,z_m",
    "data": "x_m,y_m,z_m,gz_mgal,std_mgal",
    "model": "i,j,k,x_m,y_m,z_m,rho_gcc",
    "log": "iter,alpha,chi2,re,seconds",
    "spectrum": "index,sigma",
    "upre": "alpha,upre",
}

GEOMETRY_KEYS = ("nx", "ny", "nz", "dx", "dy", "dz")


def _load(path, kind) -> np.ndarray:
    expect = HEADERS[kind]
    ncol = expect.count(",") + 1
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != expect:
            raise ValueError(f"{path}: expected header {expect!r}, got {header!r}")
        body = fh.read().strip()
    if not body:
        return np.empty((0, ncol))
    arr = np.loadtxt(StringIO(body), delimiter=",", ndmin=2)
    if arr.shape[1] != ncol:
        raise ValueError(f"{path}: expected {ncol} columns, got {arr.shape[1]}")
    return arr


def read_model(path):
    """(n, 3) int cell indices, (n, 3) centers in meters, (n,) contrasts."""
    arr = _load(path, "model")
    return arr[:, :3].astype(int), arr[:, 3:6], arr[:, 6]


def read_data(path):
    """(n, 3) station coordinates, observed values, their standard deviations."""
    arr = _load(path, "data")
    return arr[:, :3], arr[:, 3], arr[:, 4]


def read_log(path) -> dict:
    arr = _load(path, "log")
    names = HEADERS["log"].split(",")
    return {name: arr[:, i] for i, name in enumerate(names)}


def read_spectrum(path):
    arr = _load(path, "spectrum")
    return arr[:, 0], arr[:, 1]


def read_upre(path):
    arr = _load(path, "upre")
    return arr[:, 0], arr[:, 1]


def read_config(path) -> dict:
    """Parse `key = value` lines; ints, then floats, strings as fallback."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (part.strip() for part in line.partition("="))
        if not sep or not key or not value:
            raise ValueError(f"{path}:{lineno}: cannot parse {raw!r}")
        for cast in (int, float):
            try:
                value = cast(value)
                break
            except ValueError:
                continue
        out[key] = value
    return out


def mesh_geometry(cfg: dict):
    """Cell counts, cell sizes, and origin from a parsed config.

    Returns ((nx, ny, nz), (dx, dy, dz), (ox, oy, oz)); the origin keys
    default to zero, the geometry keys are required.
    """
    missing = [k for k in GEOMETRY_KEYS if k not in cfg]
    if missing:
        raise ValueError(f"config is missing mesh keys: {', '.join(missing)}")
    dims = tuple(int(cfg[k]) for k in ("nx", "ny", "nz"))
    cell = tuple(float(cfg[k]) for k in ("dx", "dy", "dz"))
    if any(v < 1 for v in dims) or any(v <= 0 for v in cell):
        raise ValueError("mesh keys must be positive")
    origin = tuple(float(cfg.get(f"origin_{ax}", 0.0)) for ax in "xyz")
    return dims, cell, origin
