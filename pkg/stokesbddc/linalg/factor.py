"""Sparse direct factorization on top of SuperLU."""

from __future__ import annotations

from typing import Dict, Literal, Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..errors import DimensionError, SingularMatrixError, ValidationError
from .sparse import SparseMatrix

FactorKind = Literal["spd", "symmetric-indefinite", "general"]

PIVOT_RTOL = 1e-14

# SuperLU settings per matrix kind. Symmetric kinds keep the pivots on the
# diagonal whenever possible so the fill-reducing ordering of A + A^T survives.
_SUPERLU_OPTIONS: Dict[str, Dict[str, object]] = {
    "spd": {
        "permc_spec": "MMD_AT_PLUS_A",
        "diag_pivot_thresh": 0.0,
        "options": {"SymmetricMode": True},
    },
    "symmetric-indefinite": {
        "permc_spec": "MMD_AT_PLUS_A",
        "diag_pivot_thresh": 0.1,
        "options": {"SymmetricMode": True},
    },
    "general": {
        "permc_spec": "COLAMD",
        "diag_pivot_thresh": 1.0,
    },
}


class Factorization:
    """Opaque factorization of a square sparse matrix.

    Solves reuse the stored factors; the original matrix is kept for
    residual checks.
    """

    def __init__(
        self,
        matrix: SparseMatrix,
        kind: str,
        lu: Optional[spla.SuperLU],
        min_pivot: float,
    ) -> None:
        self.matrix = matrix
        self.kind = kind
        self._lu = lu
        self.min_pivot = min_pivot

    @property
    def n(self) -> int:
        return self.matrix.n_rows

    @property
    def nnz_factors(self) -> int:
        if self._lu is None:
            return 0
        return int(self._lu.L.nnz + self._lu.U.nnz)

    def solve(self, b: np.ndarray) -> np.ndarray:
        """Solve M x = b for one right-hand side or a block of columns."""
        b = np.asarray(b, dtype=np.float64)
        if b.shape[0] != self.n or b.ndim > 2:
            raise DimensionError("solve", self.n, b.shape)
        if self.n == 0:
            return np.zeros_like(b)
        x = self._lu.solve(b)  # type: ignore[union-attr]
        return np.asarray(x)

    def __repr__(self) -> str:
        return f"Factorization(n={self.n}, kind={self.kind!r}, nnz_factors={self.nnz_factors})"


def factor(matrix: SparseMatrix, kind: str = "general") -> Factorization:
    """Factor a square sparse matrix.

    Args:
        matrix: Square matrix
        kind: 'spd', 'symmetric-indefinite' or 'general'

    Returns:
        Factorization usable for repeated solves

    Raises:
        ValidationError: Unknown kind, non-square matrix or a symmetric kind
            requested for a matrix not flagged symmetric
        SingularMatrixError: A pivot is below 1e-14 * ||M||_inf
    """
    if kind not in _SUPERLU_OPTIONS:
        raise ValidationError(f"unknown factorization kind '{kind}'", "kind")
    if matrix.n_rows != matrix.n_cols:
        raise ValidationError(f"matrix must be square, got {matrix.shape}", "matrix")
    if kind != "general" and not matrix.symmetric:
        raise ValidationError(f"kind '{kind}' requires a symmetric matrix", "kind")

    if matrix.n_rows == 0:
        return Factorization(matrix, kind, None, np.inf)

    norm = matrix.norm_inf()
    if norm == 0.0:
        raise SingularMatrixError("zero matrix", 0)

    settings = dict(_SUPERLU_OPTIONS[kind])
    options = dict(settings.pop("options", {}))  # type: ignore[call-overload]
    try:
        lu = spla.splu(sp.csc_matrix(matrix.csr), options=options, **settings)
    except RuntimeError as e:
        # SuperLU reports exact singularity as "Factor is exactly singular"
        raise SingularMatrixError(str(e)) from e

    u_diag = np.abs(lu.U.diagonal())
    j = int(np.argmin(u_diag))
    min_pivot = float(u_diag[j])
    if min_pivot < PIVOT_RTOL * norm:
        # column j of U corresponds to original column perm_c^{-1}(j)
        pivot_index = int(np.argsort(lu.perm_c)[j])
        raise SingularMatrixError(
            f"pivot {min_pivot:.3e} below {PIVOT_RTOL:g} * ||M||_inf", pivot_index
        )
    return Factorization(matrix, kind, lu, min_pivot)


def solve(factorization: Factorization, b: np.ndarray) -> np.ndarray:
    """Return x with M x = b using a stored factorization."""
    return factorization.solve(b)
