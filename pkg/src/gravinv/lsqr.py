"""Golub-Kahan bidiagonalization and the projected-subspace baseline solver.

The factorization builds orthonormal bases for the Krylov spaces of A^T A and
A A^T seeded by the current residual, plus the small lower-bidiagonal matrix
coupling them. Full reorthogonalization (classical Gram-Schmidt, applied
twice) keeps the bases usable well past the point where the three-term
recurrence alone would drift. The SVD of the small matrix then yields a
spectral triple in the same shape the filtered solver consumes, so the
iteratively reweighted driver runs unchanged on top of it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rsvd import SvdTriple

#: relative scale below which a recurrence norm counts as exact breakdown
BREAKDOWN_TOL = 1e-12


@dataclass(frozen=True)
class GkbFactorization:
    """Bases and recurrence coefficients from t bidiagonalization steps.

    us has t+1 columns, vs has t. betas[0] is the seed residual norm;
    betas[i] for i >= 1 is the subdiagonal entry produced at step i. When the
    recurrence hit an invariant subspace early, t reflects the truncated size
    and breakdown is set.
    """

    us: np.ndarray
    vs: np.ndarray
    alphas: np.ndarray
    betas: np.ndarray
    t: int
    breakdown: bool
    reorth: bool

    def bidiagonal(self) -> np.ndarray:
        """The (t+1) x t lower-bidiagonal coupling matrix."""
        B = np.zeros((self.t + 1, self.t))
        idx = np.arange(self.t)
        B[idx, idx] = self.alphas
        B[idx + 1, idx] = self.betas[1:]
        return B


def _reorthogonalize(w, basis, ncols):
    """Two rounds of classical Gram-Schmidt against the first ncols columns."""
    for _ in range(2):
        w = w - basis[:, :ncols] @ (basis[:, :ncols].T @ w)
    return w


def gkb(A, r, t: int, reorth: bool = True) -> GkbFactorization:
    """Run t bidiagonalization steps of A seeded by the residual r.

    Consumes exactly t forward and t adjoint products with A. Adjoint
    products are written `u @ A` so operator wrappers that instrument both
    directions see them as such. Breakdown (an invariant subspace smaller
    than t) truncates the factorization and flags it rather than failing.
    """
    m, n = A.shape
    r = np.asarray(r, dtype=float)
    if r.shape != (m,):
        raise ValueError(f"residual must have shape ({m},)")
    if not 1 <= t <= min(m, n):
        raise ValueError(f"step count t={t} outside [1, {min(m, n)}]")

    us = np.zeros((m, t + 1))
    vs = np.zeros((n, t))
    alphas = np.zeros(t)
    betas = np.zeros(t + 1)

    beta1 = float(np.linalg.norm(r))
    if beta1 == 0:
        raise ValueError("cannot seed the factorization with a zero residual")
    betas[0] = beta1
    us[:, 0] = r / beta1

    z = us[:, 0] @ A  # adjoint product
    alpha = float(np.linalg.norm(z))
    scale = alpha + beta1
    if alpha <= BREAKDOWN_TOL * scale:
        raise ValueError("adjoint of the seed residual vanished; nothing to project")
    alphas[0] = alpha
    vs[:, 0] = z / alpha

    breakdown = False
    steps = t
    for i in range(t):
        w = A @ vs[:, i] - alphas[i] * us[:, i]  # forward product
        if reorth:
            w = _reorthogonalize(w, us, i + 1)
        beta = float(np.linalg.norm(w))
        if beta <= BREAKDOWN_TOL * scale:
            steps = i + 1
            breakdown = True
            break
        betas[i + 1] = beta
        us[:, i + 1] = w / beta
        if i + 1 == t:
            break
        z = us[:, i + 1] @ A - beta * vs[:, i]  # adjoint product
        if reorth:
            z = _reorthogonalize(z, vs, i + 1)
        alpha = float(np.linalg.norm(z))
        if alpha <= BREAKDOWN_TOL * scale:
            steps = i + 1
            breakdown = True
            break
        alphas[i + 1] = alpha
        vs[:, i + 1] = z / alpha

    return GkbFactorization(
        us=us[:, : steps + 1],
        vs=vs[:, :steps],
        alphas=alphas[:steps],
        betas=betas[: steps + 1],
        t=steps,
        breakdown=breakdown,
        reorth=reorth,
    )


def projected_triple(fact: GkbFactorization) -> SvdTriple:
    """Spectral triple of A restricted to the bidiagonalization subspaces.

    SVD of the small coupling matrix, rotated back through the bases. The
    result plays the same role as a rank-t randomized factorization.
    """
    B = fact.bidiagonal()
    P, s, Wt = np.linalg.svd(B, full_matrices=False)
    return SvdTriple(
        U=fact.us @ P,
        sigma=s,
        V=fact.vs @ Wt.T,
        q=fact.t,
        l=fact.t,
    )


def lsqr_invert(G, d_obs, wd, m_apr, t: int, **kwargs):
    """Reweighted inversion with the Krylov-projected factorization.

    Convenience front end over the shared driver; keyword arguments are
    passed through to InversionConfig (minus solver and t, fixed here).
    """
    from .inversion import InversionConfig, invert

    keyword_only = {k: kwargs.pop(k) for k in ("wz", "wh", "m_exact") if k in kwargs}
    cfg = InversionConfig(solver="lsqr", t=t, **kwargs)
    return invert(G, d_obs, wd, m_apr, cfg, **keyword_only)
