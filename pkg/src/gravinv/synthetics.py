"""Synthetic density models and the noise model for desk-scale experiments.

Models are unions of axis-aligned boxes over a zero background. Box faces
must land exactly on mesh cell boundaries so a box is always representable
as whole cells; anything else is a setup error worth failing loudly on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mesh import Mesh


@dataclass(frozen=True)
class BodySpec:
    """One axis-aligned box: bounds in meters, density contrast in g/cm^3."""

    x1: float
    x2: float
    y1: float
    y2: float
    z1: float
    z2: float
    rho: float

    def __post_init__(self):
        if not (self.x1 < self.x2 and self.y1 < self.y2 and self.z1 < self.z2):
            raise ValueError("box bounds must satisfy lo < hi on every axis")


@dataclass(frozen=True)
class NoiseSpec:
    """Per-datum standard deviation eta_i = a*d_i + b*||d||, plus the seed."""

    a: float
    b: float
    seed: int = 0
    abs_values: bool = False  # use a*|d_i| when the field changes sign

    def __post_init__(self):
        if self.a < 0 or self.b < 0:
            raise ValueError("noise factors must be >= 0")
        if self.a == 0 and self.b == 0:
            raise ValueError("noise requested with a = b = 0")


def _cell_span(lo: float, hi: float, origin: float, step: float, count: int, axis: str):
    """Map [lo, hi] to a cell index range, failing unless both faces snap."""
    tol = 1e-9 * max(abs(hi), step)
    i_lo = (lo - origin) / step
    i_hi = (hi - origin) / step
    for name, val in (("lower", i_lo), ("upper", i_hi)):
        if abs(val - round(val)) > tol / step:
            raise ValueError(
                f"{name} {axis}-face at {lo if name == 'lower' else hi} m does "
                f"not snap to the {step} m cell grid"
            )
    i_lo, i_hi = int(round(i_lo)), int(round(i_hi))
    if i_lo < 0 or i_hi > count:
        raise ValueError(f"box {axis}-range [{lo}, {hi}] leaves the mesh extent")
    return i_lo, i_hi


def model_from_bodies(mesh: Mesh, bodies: list[BodySpec]) -> np.ndarray:
    """Rasterize boxes onto the mesh; later boxes overwrite earlier ones."""
    rho = np.zeros((mesh.nx, mesh.ny, mesh.nz))
    x0, y0, z0 = mesh.origin
    for b in bodies:
        ix1, ix2 = _cell_span(b.x1, b.x2, x0, mesh.dx, mesh.nx, "x")
        iy1, iy2 = _cell_span(b.y1, b.y2, y0, mesh.dy, mesh.ny, "y")
        iz1, iz2 = _cell_span(b.z1, b.z2, z0, mesh.dz, mesh.nz, "z")
        rho[ix1:ix2, iy1:iy2, iz1:iz2] = b.rho
    return rho.reshape(-1)  # (ix*ny + iy)*nz + iz ordering, matching flat_index


def two_cube_bodies(mesh: Mesh) -> list[BodySpec]:
    """Two 300 x 300 x 200 m unit cubes at 50 m depth, centered at one and two
    thirds of the x-extent on the y-midline."""
    ex, ey, _ = mesh.extent
    half = 150.0
    ymid = mesh.origin[1] + ey / 2.0
    cubes = []
    for frac in (1.0 / 3.0, 2.0 / 3.0):
        cx = mesh.origin[0] + frac * ex
        cubes.append(
            BodySpec(cx - half, cx + half, ymid - half, ymid + half, 50.0, 250.0, 1.0)
        )
    return cubes


def make_two_cube_model(mesh: Mesh) -> np.ndarray:
    return model_from_bodies(mesh, two_cube_bodies(mesh))


#: six-body plan geometry: x as fractions of the x-extent (multiples of 0.02
#: so faces snap at both the full 100-cell and the half 50-cell layouts),
#: y and z in meters
MULTIBODY_PLAN = (
    (0.12, 0.20, 400.0, 800.0, 50.0, 250.0),
    (0.32, 0.50, 1700.0, 2000.0, 0.0, 200.0),
    (0.58, 0.68, 500.0, 1000.0, 150.0, 400.0),
    (0.74, 0.90, 1600.0, 2100.0, 100.0, 200.0),
    (0.22, 0.30, 1500.0, 1900.0, 200.0, 400.0),
    (0.84, 0.90, 400.0, 700.0, 50.0, 200.0),
)


def multibody_bodies(mesh: Mesh) -> list[BodySpec]:
    """Six separated unit-contrast boxes spanning depths 0-400 m."""
    ex = mesh.extent[0]
    x0 = mesh.origin[0]
    return [
        BodySpec(x0 + f1 * ex, x0 + f2 * ex, y1, y2, z1, z2, 1.0)
        for f1, f2, y1, y2, z1, z2 in MULTIBODY_PLAN
    ]


def make_multibody_model(mesh: Mesh) -> np.ndarray:
    return model_from_bodies(mesh, multibody_bodies(mesh))


def add_noise(d_exact, spec: NoiseSpec):
    """Observed data and its per-datum standard deviations.

    eta_i = a*d_i + b*||d||_2 (or a*|d_i| with abs_values), d_obs = d + eta*z
    with z standard normal drawn from the spec seed. Returns (d_obs, eta);
    diag(1/eta) whitens the residuals.
    """
    d = np.asarray(d_exact, dtype=float)
    if d.size == 0:
        raise ValueError("d_exact is empty")
    scale = np.abs(d) if spec.abs_values else d
    eta = spec.a * scale + spec.b * np.linalg.norm(d)
    if np.any(eta <= 0):
        raise ValueError(
            "some standard deviations are non-positive; for sign-changing "
            "data use NoiseSpec(abs_values=True)"
        )
    zeta = np.random.default_rng(spec.seed).standard_normal(d.size)
    return d + eta * zeta, eta
