"""Independent oracles shared by the test modules.

Everything here is deliberately written from first principles (midpoint
quadrature, plain-Python summation, dense solves) so library code is checked
against an implementation that shares no code paths with it.
"""

import math

import numpy as np

GAMMA = 6.674e-11


def prism_quadrature_gz(prism, station, nsub=100):
    """Vertical gravity of a prism as a sum of nsub^3 point masses.

    Midpoint rule, z positive down, result in mGal per g/cm^3.
    """
    x1, x2, y1, y2, z1, z2 = prism
    xs, ys, zs = station
    xe = np.linspace(x1, x2, nsub + 1)
    ye = np.linspace(y1, y2, nsub + 1)
    ze = np.linspace(z1, z2, nsub + 1)
    xc = 0.5 * (xe[1:] + xe[:-1]) - xs
    yc = 0.5 * (ye[1:] + ye[:-1]) - ys
    zc = 0.5 * (ze[1:] + ze[:-1]) - zs
    dv = (x2 - x1) * (y2 - y1) * (z2 - z1) / nsub**3
    X, Y, Z = np.meshgrid(xc, yc, zc, indexing="ij")
    r2 = X * X + Y * Y + Z * Z
    # density 1 g/cm^3 = 1000 kg/m^3; 1e5 converts m/s^2 to mGal
    return GAMMA * 1000.0 * dv * float(np.sum(Z / r2**1.5)) * 1e5


def upre_reference(alpha, sigma, beta):
    """Scalar-loop UPRE evaluation with a different algebraic arrangement."""
    terms = []
    for s, b in zip(sigma, beta):
        filt = alpha**2 / (s**2 + alpha**2)
        terms.append(filt * filt * b * b)
    trace = [s**2 / (s**2 + alpha**2) for s in sigma]
    return math.fsum(terms) + 2.0 * math.fsum(trace) - len(sigma)


def upre_fine_grid_argmin(sigma, beta, lo, hi, npoints=1_000_000, chunk=100_000):
    """Argmin of the UPRE over a dense log grid, evaluated in chunks."""
    grid = np.logspace(np.log10(lo), np.log10(hi), npoints)
    sigma = np.asarray(sigma, dtype=float)
    beta = np.asarray(beta, dtype=float)
    best_val = np.inf
    best_alpha = grid[0]
    for start in range(0, npoints, chunk):
        a = grid[start : start + chunk][:, None]
        filt = a**2 / (sigma[None, :] ** 2 + a**2)
        vals = (filt**2 * beta[None, :] ** 2).sum(axis=1) + 2.0 * (
            sigma[None, :] ** 2 / (sigma[None, :] ** 2 + a**2)
        ).sum(axis=1) - sigma.size
        i = int(np.argmin(vals))
        if vals[i] < best_val:
            best_val = float(vals[i])
            best_alpha = float(grid[start + i])
    return best_alpha, best_val


def tikhonov_dense_solve(A, rhs, alpha, rank=None):
    """Solve (A^T A + alpha^2 I) h = A^T rhs, optionally on a rank-limited basis.

    Uses numpy's SVD directly, independent of the package's filtered form.
    """
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    if rank is not None:
        U, s, Vt = U[:, :rank], s[:rank], Vt[:rank]
    coef = s * (U.T @ rhs) / (s**2 + alpha**2)
    return Vt.T @ coef
