"""Closed-form prism gravity kernel and dense sensitivity assembly.

The vertical gravity of a right rectangular prism with unit density contrast
is the signed eight-corner sum

    g = K * sum_{i,j,k in {1,2}} (-1)^(i+j+k) F(x_i, y_j, z_k)
    F(x, y, z) = x ln(y + r) + y ln(x + r) - z arctan(x y / (z r))

where (x_i, y_j, z_k) are prism corner coordinates shifted by the station
position, r = sqrt(x^2 + y^2 + z^2), and the arctangent is the principal
branch of the ratio (0 at 0/0). Units: coordinates in meters, density in
g/cm^3, output in mGal; z is positive downward, so buried mass gives a
positive value.
"""

from __future__ import annotations

import numpy as np

from .mesh import Mesh, StationSet

#: Newtonian constant, m^3 kg^-1 s^-2.
GAMMA = 6.674e-11

#: mGal per (g/cm^3): GAMMA * 1000 (g/cm^3 -> kg/m^3) * 1e5 (m/s^2 -> mGal).
UNIT_FACTOR = GAMMA * 1.0e8

DEFAULT_MEMORY_CAP = 8 * 1024**3  # bytes of dense kernel


def _corner_sum_grid(xf, yf, zf):
    """F evaluated on a full face grid; axes are (x faces, y faces, z faces).

    Inputs are station-shifted face coordinates. Log arguments vanish only
    where their coefficient is exactly zero, so those terms are patched to
    their limit value 0. The arctangent term is zeroed where x*y == 0.
    """
    x = np.asarray(xf, dtype=float)[:, None, None]
    y = np.asarray(yf, dtype=float)[None, :, None]
    z = np.asarray(zf, dtype=float)[None, None, :]
    r = np.sqrt(x * x + y * y + z * z)

    arg_x = y + r
    arg_y = x + r
    term_x = np.where(x == 0.0, 0.0, x * np.log(np.where(arg_x <= 0.0, 1.0, arg_x)))
    term_y = np.where(y == 0.0, 0.0, y * np.log(np.where(arg_y <= 0.0, 1.0, arg_y)))

    num = x * y
    ang = np.arctan2(num, z * r)
    # fold arctan2 back to the principal branch of arctan(num / (z r))
    ang = ang - np.pi * np.sign(num) * (z * r < 0.0)
    term_z = np.where(num == 0.0, 0.0, z * ang)

    return term_x + term_y - term_z


def _triple_diff(f):
    return np.diff(np.diff(np.diff(f, axis=0), axis=1), axis=2)


def _station_contact(prism, station):
    """Classify station/prism contact: 'clear', 'top-face', or a rejection reason."""
    x1, x2, y1, y2, z1, z2 = prism
    xs, ys, zs = station
    if not (x1 <= xs <= x2 and y1 <= ys <= y2 and z1 <= zs <= z2):
        return "clear"
    inside_xy = x1 < xs < x2 and y1 < ys < y2
    if inside_xy and z1 < zs < z2:
        return "station inside prism"
    if zs == z1 and inside_xy:
        return "top-face"
    return "station on prism boundary"


def prism_gz(prism, station) -> float:
    """Vertical gravity sensitivity of one prism at one station, mGal per g/cm^3.

    Parameters
    ----------
    prism : sequence of 6 floats
        (x1, x2, y1, y2, z1, z2) corner bounds in meters, z positive down.
    station : sequence of 3 floats
        Observation point (x, y, z).

    The station may not lie inside the prism or on its boundary, with one
    exception: the open interior of the top face, where the closed form is
    finite and equals the limiting field value.
    """
    x1, x2, y1, y2, z1, z2 = (float(v) for v in prism)
    xs, ys, zs = (float(v) for v in station)
    if not (x1 < x2 and y1 < y2 and z1 < z2):
        raise ValueError(f"degenerate prism bounds {prism}")
    contact = _station_contact((x1, x2, y1, y2, z1, z2), (xs, ys, zs))
    if contact not in ("clear", "top-face"):
        raise ValueError(f"{contact}: prism {prism}, station {station}")
    f = _corner_sum_grid(
        np.array([x1, x2]) - xs, np.array([y1, y2]) - ys, np.array([z1, z2]) - zs
    )
    # corner sum is the potential gradient; gravity is its negative
    value = -UNIT_FACTOR * _triple_diff(f)[0, 0, 0]
    if not np.isfinite(value):
        raise ValueError(
            f"singular kernel evaluation for prism {prism}, station {station}"
        )
    return float(value)


def assemble_kernel(
    mesh: Mesh, stations: StationSet, memory_cap: int = DEFAULT_MEMORY_CAP
) -> np.ndarray:
    """Dense m x n sensitivity matrix G, G[i, j] = prism_gz(cell j, station i).

    Rows are computed independently from a shared face-coordinate grid, so any
    row partitioning gives bitwise-identical results. Refuses to allocate more
    than ``memory_cap`` bytes.
    """
    m, n = stations.m, mesh.n
    required = m * n * 8
    if required > memory_cap:
        raise ValueError(
            f"kernel needs {required} bytes for {m}x{n} doubles, "
            f"exceeding the cap of {memory_cap}; raise memory_cap to unlock"
        )
    x0, y0, z0 = mesh.origin
    xf = x0 + np.arange(mesh.nx + 1) * mesh.dx
    yf = y0 + np.arange(mesh.ny + 1) * mesh.dy
    zf = z0 + np.arange(mesh.nz + 1) * mesh.dz

    # reject stations below the shallowest face or touching any cell improperly:
    # a station must be above the mesh top, or exactly on it but clear of the
    # face lines of the first-layer cell grid
    zs_all = stations.z
    if np.any(zs_all > z0):
        raise ValueError("stations must not lie below the mesh top")
    G = np.empty((m, n), dtype=float)
    for row, (xs, ys, zs) in enumerate(stations.coords):
        if zs == z0 and (
            np.any(xf == xs) or np.any(yf == ys)
        ) and (xf[0] <= xs <= xf[-1] and yf[0] <= ys <= yf[-1]):
            raise ValueError(
                f"station {row} touches a cell edge on the mesh top plane"
            )
        f = _corner_sum_grid(xf - xs, yf - ys, zf - zs)
        G[row] = -UNIT_FACTOR * _triple_diff(f).ravel()
    if not np.all(np.isfinite(G)):
        raise ValueError("kernel assembly produced non-finite sensitivities")
    return G


def forward(G: np.ndarray, model: np.ndarray) -> np.ndarray:
    """Predicted data d = G m (mGal) for densities in g/cm^3."""
    G = np.asarray(G)
    model = np.asarray(model, dtype=float)
    if model.ndim != 1 or G.ndim != 2 or G.shape[1] != model.shape[0]:
        raise ValueError(
            f"dimension mismatch: G is {G.shape}, model has {model.shape}"
        )
    return G @ model


def forward_blocked(
    mesh: Mesh, stations: StationSet, model: np.ndarray, block: int = 256
) -> np.ndarray:
    """Predicted data without holding the full kernel: assemble station
    blocks, multiply, discard. Bitwise equal to forward(assemble_kernel(...)).
    """
    model = np.asarray(model, dtype=float)
    if model.shape != (mesh.n,):
        raise ValueError(f"model must have shape ({mesh.n},), got {model.shape}")
    if block < 1:
        raise ValueError("block size must be >= 1")
    d = np.empty(stations.m)
    for start in range(0, stations.m, block):
        part = StationSet(stations.coords[start : start + block])
        d[start : start + block] = assemble_kernel(mesh, part) @ model
    return d
