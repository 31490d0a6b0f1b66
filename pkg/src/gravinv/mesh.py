"""Regular prism meshes, station grids and depth weighting.

Coordinates are in meters with z positive downward; the observation surface
is the z = 0 plane. A mesh is a box of nx*ny*nz equal rectangular cells whose
shallowest/south-west corner sits at ``origin``.

Cell indexing: flat index j maps to (i, j, k) grid indices with the depth
index k running fastest, then y, then x::

    flat = (ix * ny + iy) * nz + iz
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Mesh:
    """Regular 3-D grid of rectangular prisms."""

    nx: int
    ny: int
    nz: int
    dx: float
    dy: float
    dz: float
    origin: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if min(self.nx, self.ny, self.nz) < 1:
            raise ValueError("cell counts must be >= 1")
        if min(self.dx, self.dy, self.dz) <= 0:
            raise ValueError("cell edge lengths must be > 0")
        if self.origin[2] < 0:
            raise ValueError(
                f"mesh top at z={self.origin[2]} lies above the observation plane"
            )

    @property
    def n(self) -> int:
        return self.nx * self.ny * self.nz

    @property
    def extent(self) -> tuple[float, float, float]:
        return (self.nx * self.dx, self.ny * self.dy, self.nz * self.dz)

    def flat_index(self, ix: int, iy: int, iz: int) -> int:
        if not (0 <= ix < self.nx and 0 <= iy < self.ny and 0 <= iz < self.nz):
            raise IndexError(f"cell ({ix},{iy},{iz}) outside {self.nx}x{self.ny}x{self.nz} grid")
        return (ix * self.ny + iy) * self.nz + iz

    def grid_index(self, flat: int) -> tuple[int, int, int]:
        if not 0 <= flat < self.n:
            raise IndexError(f"flat index {flat} outside [0, {self.n})")
        ix, rem = divmod(flat, self.ny * self.nz)
        iy, iz = divmod(rem, self.nz)
        return ix, iy, iz

    def cell_grid(self) -> np.ndarray:
        """(n, 3) int array of (ix, iy, iz) in flat order."""
        ix, iy, iz = np.meshgrid(
            np.arange(self.nx), np.arange(self.ny), np.arange(self.nz), indexing="ij"
        )
        return np.column_stack([ix.ravel(), iy.ravel(), iz.ravel()])

    def cell_centers(self) -> np.ndarray:
        """(n, 3) array of cell-center coordinates in flat order."""
        g = self.cell_grid()
        x0, y0, z0 = self.origin
        return np.column_stack(
            [
                x0 + (g[:, 0] + 0.5) * self.dx,
                y0 + (g[:, 1] + 0.5) * self.dy,
                z0 + (g[:, 2] + 0.5) * self.dz,
            ]
        )

    def cell_bounds(self) -> tuple[np.ndarray, ...]:
        """Six (n,) arrays x1, x2, y1, y2, z1, z2 of cell faces in flat order."""
        g = self.cell_grid()
        x0, y0, z0 = self.origin
        x1 = x0 + g[:, 0] * self.dx
        y1 = y0 + g[:, 1] * self.dy
        z1 = z0 + g[:, 2] * self.dz
        return x1, x1 + self.dx, y1, y1 + self.dy, z1, z1 + self.dz


def build_mesh(extent, cell_size, origin=(0.0, 0.0, 0.0)) -> Mesh:
    """Build a mesh from axis extents and a cell size.

    Parameters
    ----------
    extent : sequence of 3 floats
        Axis lengths (x, y, z) in meters. Each must be a positive multiple
        of the matching cell size.
    cell_size : float or sequence of 3 floats
        Cell edge length(s) in meters.
    origin : sequence of 3 floats
        Shallowest/south-west corner, z >= 0.

    Returns
    -------
    Mesh
    """
    ext = [float(e) for e in extent]
    if np.isscalar(cell_size):
        cs = [float(cell_size)] * 3
    else:
        cs = [float(c) for c in cell_size]
    if len(ext) != 3 or len(cs) != 3:
        raise ValueError("extent and cell_size must have 3 components")
    counts = []
    for axis, (e, c) in enumerate(zip(ext, cs)):
        if e <= 0 or c <= 0:
            raise ValueError("extents and cell sizes must be positive")
        ratio = e / c
        count = int(round(ratio))
        remainder = e - count * c
        if count < 1 or abs(remainder) > 1e-9 * max(e, c):
            raise ValueError(
                f"extent {e} on axis {axis} is not a multiple of cell size {c} "
                f"(remainder {e - int(e / c) * c:g})"
            )
        counts.append(count)
    return Mesh(counts[0], counts[1], counts[2], cs[0], cs[1], cs[2], tuple(origin))


@dataclass(frozen=True)
class StationSet:
    """Measurement points, by default on the z = 0 plane."""

    coords: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.coords, dtype=float))
        if c.ndim != 2 or c.shape[1] != 3:
            raise ValueError("station coordinates must be (m, 3)")
        if c.shape[0] < 1:
            raise ValueError("need at least one station")
        if not np.all(np.isfinite(c)):
            raise ValueError("station coordinates must be finite")
        object.__setattr__(self, "coords", c)

    @property
    def m(self) -> int:
        return self.coords.shape[0]

    @property
    def x(self) -> np.ndarray:
        return self.coords[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.coords[:, 1]

    @property
    def z(self) -> np.ndarray:
        return self.coords[:, 2]


def surface_stations(mesh: Mesh, z: float = 0.0) -> StationSet:
    """One station above each horizontal cell center, nx*ny in flat (x, y) order.

    The station plane must not dip below the shallowest cell top.
    """
    if z > mesh.origin[2]:
        raise ValueError(f"station plane z={z} lies below the mesh top z={mesh.origin[2]}")
    xs = mesh.origin[0] + (np.arange(mesh.nx) + 0.5) * mesh.dx
    ys = mesh.origin[1] + (np.arange(mesh.ny) + 0.5) * mesh.dy
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    coords = np.column_stack([gx.ravel(), gy.ravel(), np.full(gx.size, float(z))])
    return StationSet(coords)


def depth_weighting(mesh: Mesh, beta: float = 0.8, z0: float | None = None) -> np.ndarray:
    """Diagonal depth weights (z_center + z0)^(-beta), one entry per cell.

    ``z0`` defaults to half the vertical cell size. Entries are positive and
    non-increasing with cell depth, countering the kernel's depth decay.
    """
    if beta <= 0:
        raise ValueError("beta must be > 0")
    if z0 is None:
        z0 = 0.5 * mesh.dz
    if z0 < 0:
        raise ValueError("z0 must be >= 0")
    zc = mesh.cell_centers()[:, 2]
    base = zc + z0
    if np.any(base <= 0):
        raise ValueError("z_center + z0 must be positive for every cell")
    return base ** (-beta)
