"""Threshold incomplete LU factorization (ILUT) without a fill cap.

Rows are eliminated one at a time (IKJ order) in a dense work row. Entries
below tau * ||a_i||_2 are dropped, both for the multipliers l_ik and for the
finished row. Diagonal entries are always kept.

Saddle-point matrices have zero diagonal entries in the pressure block;
those rows are shifted by -shift_factor * ||A||_inf before factorization.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve_triangular

from ..errors import DimensionError, IlutFactorError, ValidationError
from ..logging import ilut_logger
from ..utils.time import time_ms
from .sparse import SparseMatrix


@dataclass
class IlutPrecon:
    """ILUT factors L (unit lower, diagonal not stored) and U.

    Attributes:
        lower: Strictly lower triangular part of L (CSR)
        upper: Upper triangular U including the diagonal (CSR)
        tau: Drop tolerance used
        shift: Magnitude of the diagonal shift applied to zero-diagonal rows
        shifted_rows: Rows that received the shift
        pivot_replacements: Zero pivots replaced by the shift during elimination
    """

    lower: sp.csr_matrix
    upper: sp.csr_matrix
    tau: float
    shift: float
    shifted_rows: np.ndarray
    pivot_replacements: int = 0

    @property
    def n(self) -> int:
        return int(self.upper.shape[0])

    @property
    def nnz(self) -> int:
        return int(self.lower.nnz + self.upper.nnz)

    def apply(self, r: np.ndarray) -> np.ndarray:
        """Return z = U^{-1} L^{-1} r."""
        r = np.asarray(r, dtype=np.float64)
        if r.shape != (self.n,):
            raise DimensionError("ilut_apply", self.n, r.shape)
        if not np.any(r):
            return np.zeros_like(r)
        y = spsolve_triangular(self.lower, r, lower=True, unit_diagonal=True)
        return np.asarray(spsolve_triangular(self.upper, y, lower=False))

    def __call__(self, r: np.ndarray) -> np.ndarray:
        return self.apply(r)


def ilut_factor(
    matrix: SparseMatrix,
    tau: float,
    shift_factor: float = 1e-12,
    shift_rows: Optional[np.ndarray] = None,
) -> IlutPrecon:
    """Compute the ILUT factorization of a square sparse matrix.

    Args:
        matrix: Square matrix
        tau: Drop tolerance (0 gives a complete LU without pivoting)
        shift_factor: Shift size relative to ||A||_inf
        shift_rows: Rows to shift; defaults to rows with a zero diagonal

    Returns:
        IlutPrecon

    Raises:
        IlutFactorError: If a pivot is exactly zero and no shift is available
    """
    if tau < 0.0:
        raise ValidationError(f"tau must be non-negative, got {tau}", "tau")
    if matrix.n_rows != matrix.n_cols:
        raise ValidationError(f"matrix must be square, got {matrix.shape}", "matrix")

    n = matrix.n_rows
    A = matrix.csr.copy()
    shift = shift_factor * matrix.norm_inf()
    if shift_rows is None:
        shift_rows = np.flatnonzero(A.diagonal() == 0.0)
    shift_rows = np.asarray(shift_rows, dtype=np.int64)
    if shift_rows.size and shift > 0.0:
        A = (A - sp.csr_matrix((np.full(shift_rows.size, shift), (shift_rows, shift_rows)), shape=(n, n))).tocsr()
        A.sort_indices()
        ilut_logger.info(f"Shifted {shift_rows.size} rows by -{shift:.3e}")

    row_norms = np.sqrt(np.asarray(A.multiply(A).sum(axis=1)).ravel())

    work = np.zeros(n)
    present = np.zeros(n, dtype=bool)
    u_diag = np.zeros(n)
    u_cols: List[np.ndarray] = []
    u_vals: List[np.ndarray] = []
    l_cols: List[np.ndarray] = []
    l_vals: List[np.ndarray] = []
    replacements = 0

    with time_ms() as timer:
        for i in range(n):
            start, end = A.indptr[i], A.indptr[i + 1]
            cols = A.indices[start:end]
            work[cols] = A.data[start:end]
            present[cols] = True
            touched = [cols]
            drop = tau * row_norms[i]

            pending = [int(c) for c in cols if c < i]
            heapq.heapify(pending)
            while pending:
                k = heapq.heappop(pending)
                factor_k = work[k] / u_diag[k]
                if abs(factor_k) < drop or factor_k == 0.0:
                    work[k] = 0.0
                    continue
                work[k] = factor_k
                uc = u_cols[k]
                if uc.size == 0:
                    continue
                fresh = uc[~present[uc]]
                if fresh.size:
                    present[fresh] = True
                    touched.append(fresh)
                    for c in fresh[fresh < i]:
                        heapq.heappush(pending, int(c))
                work[uc] -= factor_k * u_vals[k]

            idx = np.unique(np.concatenate(touched))
            vals = work[idx]
            keep = (np.abs(vals) >= drop) & (vals != 0.0)
            lower = (idx < i) & keep
            upper = (idx > i) & keep
            pivot = work[i]
            if pivot == 0.0:
                if shift > 0.0:
                    pivot = -shift
                    replacements += 1
                    ilut_logger.warning(f"ILUT zero pivot at row {i} replaced by {-shift:.3e}")
                else:
                    raise IlutFactorError("zero pivot", i)
            l_cols.append(idx[lower])
            l_vals.append(vals[lower])
            u_cols.append(idx[upper])
            u_vals.append(vals[upper])
            u_diag[i] = pivot

            work[idx] = 0.0
            present[idx] = False

    L = _rows_to_csr(l_cols, l_vals, n)
    U = _rows_to_csr(
        [np.concatenate([[i], c]) for i, c in enumerate(u_cols)],
        [np.concatenate([[u_diag[i]], v]) for i, v in enumerate(u_vals)],
        n,
    )
    ilut_logger.info(
        f"ILUT(tau={tau:g}): nnz(L)={L.nnz}, nnz(U)={U.nnz} for nnz(A)={matrix.nnz} "
        f"in {timer.elapsed_ms:.1f}ms"
    )
    return IlutPrecon(
        lower=L,
        upper=U,
        tau=tau,
        shift=shift if shift_rows.size else 0.0,
        shifted_rows=shift_rows,
        pivot_replacements=replacements,
    )


def _rows_to_csr(cols: List[np.ndarray], vals: List[np.ndarray], n: int) -> sp.csr_matrix:
    lengths = np.array([c.size for c in cols], dtype=np.int64)
    indptr = np.concatenate([[0], np.cumsum(lengths)])
    indices = np.concatenate(cols).astype(np.int64) if n else np.zeros(0, dtype=np.int64)
    data = np.concatenate(vals).astype(np.float64) if n else np.zeros(0)
    matrix = sp.csr_matrix((data, indices, indptr), shape=(n, n))
    matrix.sort_indices()
    return matrix


def ilut_apply(precon: IlutPrecon, r: np.ndarray) -> np.ndarray:
    return precon.apply(r)
