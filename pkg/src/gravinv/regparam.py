"""Unbiased predictive risk estimation on a projected spectrum.

Selects the Tikhonov parameter alpha by minimizing

    U(alpha) = sum_i (1 / (sigma_i^2 alpha^-2 + 1))^2 beta_i^2
             + 2 sum_i sigma_i^2 / (sigma_i^2 + alpha^2) - q

over a log grid between the smallest and largest singular value, followed by
a golden-section polish around the best grid point. ``beta_i`` are the
projected data coefficients u_i^T r.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize


@dataclass(frozen=True)
class UpreInput:
    """Spectrum and projected data coefficients feeding the risk function."""

    sigma: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        sigma = np.asarray(self.sigma, dtype=float)
        beta = np.asarray(self.beta, dtype=float)
        if sigma.ndim != 1 or sigma.shape != beta.shape:
            raise ValueError("sigma and beta must be 1-D and the same length")
        if sigma.size < 1:
            raise ValueError("need at least one singular value")
        if np.any(sigma <= 0) or np.any(np.diff(sigma) > 0):
            raise ValueError("sigma must be positive and non-increasing")
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "beta", beta)

    @property
    def q(self) -> int:
        return self.sigma.size


@dataclass(frozen=True)
class AlphaSearch:
    """Grid/refinement policy for the alpha search."""

    grid_size: int = 100
    lo: float | None = None  # defaults to sigma_min
    hi: float | None = None  # defaults to sigma_max
    refine: bool = True
    refine_tol: float = 1e-3  # relative, passed to the golden polish

    def __post_init__(self):
        if self.grid_size < 2:
            raise ValueError("grid_size must be >= 2")
        for v in (self.lo, self.hi):
            if v is not None and v <= 0:
                raise ValueError("search range endpoints must be positive")
        if self.lo is not None and self.hi is not None and self.lo > self.hi:
            raise ValueError(f"empty search range [{self.lo}, {self.hi}]")


@dataclass(frozen=True)
class AlphaResult:
    """Outcome of an alpha search, including endpoint/degeneracy diagnostics."""

    alpha: float
    index: int  # coarse-grid argmin
    boundary: bool  # argmin on a grid endpoint
    degenerate: bool  # risk flat across the whole grid
    grid: np.ndarray
    values: np.ndarray


def upre_value(alpha: float, inp: UpreInput) -> float:
    """Evaluate the predictive risk at one alpha > 0."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    s2 = inp.sigma**2
    a2 = alpha * alpha
    filt = 1.0 / (s2 / a2 + 1.0)
    return float(np.sum(filt**2 * inp.beta**2) + 2.0 * np.sum(s2 / (s2 + a2)) - inp.q)


def _upre_on_grid(inp: UpreInput, grid: np.ndarray) -> np.ndarray:
    s2 = inp.sigma[None, :] ** 2
    a2 = grid[:, None] ** 2
    filt = a2 / (s2 + a2)
    return (filt**2 * inp.beta[None, :] ** 2).sum(axis=1) + 2.0 * (
        s2 / (s2 + a2)
    ).sum(axis=1) - inp.q


def minimize_upre(inp: UpreInput, search: AlphaSearch | None = None) -> AlphaResult:
    """Grid argmin of the risk, ties toward larger alpha, plus a golden polish.

    A flat risk curve is reported as degenerate and resolved to the largest
    grid alpha; an argmin on the grid edge sets the boundary flag so callers
    never mistake an endpoint for an interior minimum.
    """
    if search is None:
        search = AlphaSearch()
    lo = search.lo if search.lo is not None else float(inp.sigma[-1])
    hi = search.hi if search.hi is not None else float(inp.sigma[0])
    if lo > hi:
        raise ValueError(f"empty search range [{lo}, {hi}]")
    grid = np.logspace(np.log10(lo), np.log10(hi), search.grid_size)
    values = _upre_on_grid(inp, grid)

    spread = np.ptp(values)
    if spread <= 1e-12 * max(1.0, float(np.max(np.abs(values)))):
        return AlphaResult(float(grid[-1]), search.grid_size - 1, True, True, grid, values)

    # argmin with ties broken toward larger alpha
    reversed_idx = int(np.argmin(values[::-1]))
    idx = search.grid_size - 1 - reversed_idx
    alpha = float(grid[idx])
    boundary = idx in (0, search.grid_size - 1)

    if search.refine and not boundary:
        bracket = (grid[idx - 1], grid[idx], grid[idx + 1])
        try:
            res = optimize.minimize_scalar(
                lambda a: upre_value(a, inp),
                bracket=bracket,
                method="golden",
                options={"xtol": search.refine_tol},
            )
            if res.fun < values[idx] and bracket[0] <= res.x <= bracket[2]:
                alpha = float(res.x)
        except ValueError:
            pass  # flat neighborhood, keep the grid point
    return AlphaResult(alpha, idx, boundary, False, grid, values)


def initial_alpha(sigma, factor: float = 50.0) -> float:
    """First-iteration alpha: a large multiple of the top singular value."""
    sigma = np.asarray(sigma, dtype=float)
    if sigma.size == 0:
        raise ValueError("sigma must be non-empty")
    if factor <= 0:
        raise ValueError("factor must be positive")
    return factor * float(sigma[0])


def default_truncation(sigma, rel_cut: float = 1e-3) -> int:
    """Number of leading singular values at or above rel_cut * sigma_1."""
    sigma = np.asarray(sigma, dtype=float)
    if rel_cut <= 0:
        return sigma.size
    return max(1, int(np.sum(sigma >= rel_cut * sigma[0])))


def truncated_upre(
    inp: UpreInput, trunc: int | None = None, search: AlphaSearch | None = None,
    rel_cut: float = 1e-3,
) -> AlphaResult:
    """Risk minimization on the leading ``trunc`` spectrum entries only.

    Projected spectra from Krylov methods inherit spurious small singular
    values that drag the minimizer down; cutting them restores a parameter
    sized for the dominant spectrum. Default cut keeps sigma_i >= 1e-3 sigma_1.
    """
    if trunc is None:
        trunc = default_truncation(inp.sigma, rel_cut)
    if not 1 <= trunc <= inp.q:
        raise ValueError(f"truncation index {trunc} outside [1, {inp.q}]")
    return minimize_upre(UpreInput(inp.sigma[:trunc], inp.beta[:trunc]), search)
