"""Matrix wrapper that counts products against the wrapped operator."""

from __future__ import annotations

import numpy as np


class CountingMatrix:
    """Dense matrix proxy counting how often the full matrix is touched.

    ``A @ x`` increments the forward counter, ``x @ A`` the adjoint counter.
    Everything else delegates to the wrapped array, so the proxy can stand in
    for the system matrix inside the factorization routines.
    """

    __array_ufunc__ = None

    def __init__(self, a):
        self._a = np.asarray(a)
        self.forward = 0
        self.adjoint = 0

    @property
    def shape(self):
        return self._a.shape

    @property
    def dtype(self):
        return self._a.dtype

    @property
    def visits(self) -> int:
        return self.forward + self.adjoint

    def reset(self):
        self.forward = 0
        self.adjoint = 0

    def __matmul__(self, other):
        self.forward += 1
        return self._a @ other

    def __rmatmul__(self, other):
        self.adjoint += 1
        return other @ self._a
