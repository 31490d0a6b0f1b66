"""Randomized SVD for wide matrices, dense baseline, and the flop model.

The sketch-and-project route: draw a Gaussian test matrix, capture the row
space, project, and recover the leading singular triples of the projection
from the eigendecomposition of the small Gram matrix. Works on anything that
supports ``@`` with arrays from both sides, so instrumented wrappers (see
``counting``) pass straight through.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import get_lapack_funcs

#: relative eigenvalue cutoff below which a direction counts as rank-deficient
RANK_TOL = 1e-14

#: documented coefficient for the O(l^3) symmetric eigendecomposition step
#: (tridiagonalization plus QR iteration with vectors)
EIG_FLOP_COEFF = 9


class RankDeficiencyError(ValueError):
    """Requested rank exceeds the numerical rank of the sketched matrix."""

    def __init__(self, requested: int, achievable: int):
        self.requested = requested
        self.achievable = achievable
        super().__init__(
            f"requested rank {requested} but only {achievable} directions are "
            f"numerically independent (achievable rank {achievable})"
        )


@dataclass(frozen=True)
class RsvdConfig:
    """Target rank, oversampling and RNG seed for one factorization."""

    q: int
    p: int = 10
    seed: int = 0
    accumulate_q: bool = False  # form Q explicitly instead of factored reflectors
    b_svd: bool = False  # direct SVD of B instead of eig(B^T B)

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("target rank q must be >= 1")
        if self.p < 0:
            raise ValueError("oversampling p must be >= 0")


@dataclass(frozen=True)
class SvdTriple:
    """Rank-q factorization A ~ U diag(sigma) V^T with orthonormal U, V."""

    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray
    q: int
    l: int

    def __post_init__(self):
        if self.sigma.ndim != 1 or len(self.sigma) != self.q:
            raise ValueError("sigma must hold q values")
        if self.U.shape[1] != self.q or self.V.shape[1] != self.q:
            raise ValueError("U and V must have q columns")
        if np.any(self.sigma <= 0):
            raise ValueError("singular values must be positive")
        if np.any(np.diff(self.sigma) > 0):
            raise ValueError("singular values must be non-increasing")
        if not self.q <= self.l <= self.U.shape[0]:
            raise ValueError("need q <= l <= m")


class QFactored:
    """Orthonormal Q of a QR factorization kept as Householder reflectors.

    Supports ``Q @ x`` (applies the leading columns to a padded x) and
    ``c @ Q`` (applies from the right, then truncates), which is all the
    sketching algorithm needs. Never materializes Q unless asked.
    """

    __array_ufunc__ = None

    def __init__(self, qr: np.ndarray, tau: np.ndarray, ncols: int):
        self._qr = qr
        self._tau = tau
        self._ncols = ncols
        self._ormqr, = get_lapack_funcs(("ormqr",), (qr,))

    @property
    def shape(self):
        return (self._qr.shape[0], self._ncols)

    def _apply(self, side: str, c: np.ndarray) -> np.ndarray:
        _, work, info = self._ormqr(side, "N", self._qr, self._tau, c, -1)
        lwork = int(work[0].real)
        out, _, info = self._ormqr(side, "N", self._qr, self._tau, c, lwork)
        if info != 0:
            raise RuntimeError(f"ormqr failed with info={info}")
        return out

    def __matmul__(self, x):
        x = np.asarray(x, dtype=float)
        vector = x.ndim == 1
        if vector:
            x = x[:, None]
        if x.shape[0] != self._ncols:
            raise ValueError(f"Q has {self._ncols} columns, operand has {x.shape[0]} rows")
        padded = np.zeros((self._qr.shape[0], x.shape[1]))
        padded[: self._ncols] = x
        out = self._apply("L", padded)
        return out[:, 0] if vector else out

    def __rmatmul__(self, c):
        c = np.asarray(c, dtype=float)
        if c.ndim != 2 or c.shape[1] != self._qr.shape[0]:
            raise ValueError("left operand must be 2-D with matching inner dimension")
        # stream row blocks so c @ Q never materializes a second full-width array
        n = self._qr.shape[0]
        rows_per_block = max(1, int(64e6 // (8 * n)))
        out = np.empty((c.shape[0], self._ncols))
        for start in range(0, c.shape[0], rows_per_block):
            block = c[start : start + rows_per_block]
            out[start : start + block.shape[0]] = self._apply("R", block)[:, : self._ncols]
        return out

    def dense(self) -> np.ndarray:
        return self @ np.eye(self._ncols)


def _orthonormal_rowspace(Y: np.ndarray, accumulate: bool):
    """Q with orthonormal columns spanning the rows of Y (QR of Y^T)."""
    Yt = Y.T  # Fortran-ordered view, no copy for LAPACK
    if accumulate:
        return np.linalg.qr(Yt)[0]
    geqrf, = get_lapack_funcs(("geqrf",), (Yt,))
    qr, tau, _, info = geqrf(Yt)
    if info != 0:
        raise RuntimeError(f"geqrf failed with info={info}")
    return QFactored(qr, tau, Yt.shape[1])


def rsvd(A, cfg: RsvdConfig) -> SvdTriple:
    """Rank-q randomized SVD of a wide matrix A (m <= n).

    Draws a Gaussian sketch of l = min(q + p, m) rows, orthonormalizes the
    captured row space, projects A onto it, and converts the small Gram
    eigendecomposition to singular triples. Deterministic for a fixed seed.
    The full matrix participates in exactly two products: the sketch and the
    projection.
    """
    m, n = A.shape
    if m > n:
        raise ValueError(f"expected a wide matrix (m <= n), got {A.shape}")
    if cfg.q > m:
        raise ValueError(f"target rank {cfg.q} exceeds row count {m}")
    l = min(cfg.q + cfg.p, m)
    rng = np.random.default_rng(cfg.seed)
    omega = rng.standard_normal((l, m))
    Y = omega @ A  # row-space sketch, l x n
    Q = _orthonormal_rowspace(Y, cfg.accumulate_q)
    B = A @ Q  # projection, m x l
    if cfg.b_svd:
        return _svd_of_projection(B, Q, cfg.q, l)
    return eig_to_svd(B, Q, cfg.q, l=l)


def _svd_of_projection(B, Q, q, l) -> SvdTriple:
    U, s, Wt = np.linalg.svd(np.asarray(B), full_matrices=False)
    achievable = int(np.sum(s**2 > RANK_TOL * s[0] ** 2)) if s[0] > 0 else 0
    if achievable < q:
        raise RankDeficiencyError(q, achievable)
    return SvdTriple(U[:, :q], s[:q].copy(), Q @ Wt[:q].T, q=q, l=l)


def eig_to_svd(B, Q, q: int, l: int | None = None) -> SvdTriple:
    """Convert the eigendecomposition of B^T B into singular triples of A ~ B Q^T.

    Eigenpairs are sorted descending before truncation. Roundoff-negative
    eigenvalues are clamped to zero; a clamped or below-tolerance value inside
    the leading q is reported as rank deficiency with the achievable rank.
    """
    B = np.asarray(B)
    m, lb = B.shape
    if q > lb:
        raise ValueError(f"q={q} exceeds the {lb} columns of B")
    gram = B.T @ B
    eigvals, eigvecs = np.linalg.eigh(gram)  # ascending
    order = np.argsort(eigvals)[::-1]
    eigvals = eigvals[order]
    eigvecs = eigvecs[:, order]
    if eigvals[0] <= 0:
        raise RankDeficiencyError(q, 0)
    achievable = int(np.sum(eigvals > RANK_TOL * eigvals[0]))
    if achievable < q:
        raise RankDeficiencyError(q, achievable)
    sigma = np.sqrt(np.clip(eigvals[:q], 0.0, None))
    Vt_small = eigvecs[:, :q]
    V = Q @ Vt_small
    U = (B @ Vt_small) / sigma
    return SvdTriple(U, sigma, V, q=q, l=l if l is not None else lb)


def dense_svd_underdetermined(A) -> SvdTriple:
    """Thin SVD of a wide matrix via the m x m eigendecomposition of A A^T.

    Returns every triple whose singular value clears the relative rank
    tolerance; suitable as the dense baseline when m is small.
    """
    A = np.asarray(A)
    m, n = A.shape
    if m > n:
        raise ValueError(f"expected a wide matrix (m <= n), got {A.shape}")
    w, U = np.linalg.eigh(A @ A.T)
    order = np.argsort(w)[::-1]
    w = w[order]
    U = U[:, order]
    if w[0] <= 0:
        raise RankDeficiencyError(1, 0)
    r = int(np.sum(w > RANK_TOL * w[0]))
    sigma = np.sqrt(w[:r])
    U = U[:, :r]
    V = A.T @ (U / sigma)
    return SvdTriple(U, sigma, V, q=r, l=m)


@dataclass(frozen=True)
class FlopCounts:
    """Per-step flop counts of the sketched factorization of an m x n matrix."""

    sketch: float  # 2lmn, the sketch product
    qr: float  # 2l^2(n - l/3), factoring the sketch transpose
    project: float  # 4lmn, projection using the factored Q
    gram: float  # 2l^2 m, forming B^T B
    eig: float  # EIG_FLOP_COEFF * l^3
    convert: float  # lq(2l + 3m), eigenpairs to singular triples
    total: float

    @property
    def dominant_ratio(self) -> float:
        """Share of the 6lmn sketch-plus-project cost in the total."""
        return (self.sketch + self.project) / self.total


def flop_estimate(m: int, n: int, l: int, q: int) -> FlopCounts:
    """Flop model of the randomized factorization; dominant term 6lmn.

    The eigendecomposition step is order l^3 with an implementation-dependent
    constant, reported here as EIG_FLOP_COEFF * l^3. The 6lmn share exceeds
    0.9 of the total once l << m and n >= 100 l.
    """
    if not (l <= m <= n):
        raise ValueError(f"need l <= m <= n, got l={l}, m={m}, n={n}")
    sketch = 2.0 * l * m * n
    qr = 2.0 * l**2 * (n - l / 3.0)
    project = 4.0 * l * m * n
    gram = 2.0 * l**2 * m
    eig = float(EIG_FLOP_COEFF) * l**3
    convert = 1.0 * l * q * (2 * l + 3 * m)
    total = sketch + qr + project + gram + eig + convert
    return FlopCounts(sketch, qr, project, gram, eig, convert, total)
