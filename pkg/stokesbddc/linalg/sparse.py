"""Sparse matrix storage, assembly and products.

Matrices are built once from (row, col, value) triplets and never mutated
afterwards; duplicate triplets are summed.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Optional, Tuple, Union

import numpy as np
import scipy.io
import scipy.sparse as sp

from ..errors import DimensionError, IndexBoundsError, IOError, ValidationError

Triplets = Union[
    Iterable[Tuple[int, int, float]],
    Tuple[np.ndarray, np.ndarray, np.ndarray],
]

SYMMETRY_TOL = 1e-12


class SparseMatrix:
    """Finalized sparse matrix in compressed sparse row storage.

    Attributes:
        symmetric: True when the matrix was flagged (and checked) symmetric.
        matvecs: Number of products computed with `matvec`.
    """

    def __init__(self, matrix: sp.spmatrix, symmetric: bool = False) -> None:
        csr = sp.csr_matrix(matrix, dtype=np.float64)
        csr.sum_duplicates()
        csr.sort_indices()
        self._csr = csr
        self.symmetric = bool(symmetric)
        self.matvecs = 0
        if self.symmetric and not self.is_symmetric():
            raise ValidationError("matrix flagged symmetric is not symmetric", "symmetric")

    @classmethod
    def from_triplets(
        cls,
        rows: np.ndarray,
        cols: np.ndarray,
        vals: np.ndarray,
        n_rows: int,
        n_cols: int,
        symmetric: bool = False,
    ) -> SparseMatrix:
        """Build a matrix from triplet arrays, summing duplicates."""
        rows = np.asarray(rows, dtype=np.int64).ravel()
        cols = np.asarray(cols, dtype=np.int64).ravel()
        vals = np.asarray(vals, dtype=np.float64).ravel()
        if not (rows.size == cols.size == vals.size):
            raise DimensionError("assemble", rows.size, (cols.size, vals.size))
        _check_bounds(rows, n_rows, "row")
        _check_bounds(cols, n_cols, "column")
        coo = sp.coo_matrix((vals, (rows, cols)), shape=(n_rows, n_cols))
        return cls(coo, symmetric=symmetric)

    @property
    def csr(self) -> sp.csr_matrix:
        """Underlying scipy CSR matrix (treat as read-only)."""
        return self._csr

    @property
    def shape(self) -> Tuple[int, int]:
        return self._csr.shape  # type: ignore[return-value]

    @property
    def n_rows(self) -> int:
        return self._csr.shape[0]

    @property
    def n_cols(self) -> int:
        return self._csr.shape[1]

    @property
    def nnz(self) -> int:
        return int(self._csr.nnz)

    def matvec(self, x: np.ndarray) -> np.ndarray:
        """Return y = M x."""
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 1 or x.shape[0] != self.n_cols:
            raise DimensionError("matvec", self.n_cols, x.shape)
        self.matvecs += 1
        return np.asarray(self._csr @ x)

    def __matmul__(self, x: np.ndarray) -> np.ndarray:
        return self.matvec(x)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.matvec(x)

    def submatrix(self, rows: np.ndarray, cols: Optional[np.ndarray] = None) -> SparseMatrix:
        """Extract M[rows, cols]; a principal submatrix keeps the symmetry flag."""
        principal = cols is None
        cols = rows if cols is None else cols
        block = self._csr[np.asarray(rows)][:, np.asarray(cols)]
        return SparseMatrix(block, symmetric=self.symmetric and principal)

    def diagonal(self) -> np.ndarray:
        return np.asarray(self._csr.diagonal())

    def norm_inf(self) -> float:
        """Maximum absolute row sum."""
        if self.nnz == 0:
            return 0.0
        return float(np.max(np.asarray(abs(self._csr).sum(axis=1)).ravel()))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self._csr.data))) if self.nnz else 0.0

    def is_symmetric(self, tol: float = SYMMETRY_TOL) -> bool:
        """Check |M_ij - M_ji| <= tol * max|M| entrywise."""
        if self.n_rows != self.n_cols:
            return False
        diff = self._csr - self._csr.T
        if diff.nnz == 0:
            return True
        return float(np.max(np.abs(diff.data))) <= tol * max(self.max_abs(), 1.0e-300)

    def toarray(self) -> np.ndarray:
        return self._csr.toarray()

    def write_matrix_market(self, path: Union[str, Path]) -> None:
        """Dump the matrix in MatrixMarket coordinate format."""
        try:
            scipy.io.mmwrite(
                str(path),
                self._csr.tocoo(),
                symmetry="symmetric" if self.symmetric else "general",
            )
        except OSError as e:
            raise IOError(f"Failed to write matrix: {e}", str(path)) from e

    def __repr__(self) -> str:
        return f"SparseMatrix(shape={self.shape}, nnz={self.nnz}, symmetric={self.symmetric})"


def _check_bounds(index: np.ndarray, bound: int, what: str) -> None:
    if index.size == 0:
        return
    bad = np.flatnonzero((index < 0) | (index >= bound))
    if bad.size:
        raise IndexBoundsError(f"{what} index outside matrix", int(index[bad[0]]), bound)


def assemble(
    triplets: Triplets,
    n_rows: int,
    n_cols: int,
    symmetric: bool = False,
) -> SparseMatrix:
    """Assemble a sparse matrix from triplets.

    Args:
        triplets: Either an iterable of (row, col, value) tuples or a tuple of
            three equally sized arrays.
        n_rows: Number of rows
        n_cols: Number of columns
        symmetric: Flag the result symmetric (verified on assembly)

    Returns:
        Finalized matrix; duplicate positions are summed

    Raises:
        IndexBoundsError: If a triplet lies outside the matrix
    """
    if isinstance(triplets, tuple) and len(triplets) == 3 and isinstance(triplets[0], np.ndarray):
        rows, cols, vals = triplets
    else:
        items = list(triplets)  # type: ignore[arg-type]
        if items:
            r, c, v = zip(*items)
            rows, cols, vals = np.array(r), np.array(c), np.array(v, dtype=np.float64)
        else:
            rows = cols = np.zeros(0, dtype=np.int64)
            vals = np.zeros(0)
    return SparseMatrix.from_triplets(rows, cols, vals, n_rows, n_cols, symmetric=symmetric)


def assemble_elements(
    element_matrix: np.ndarray,
    connectivity: np.ndarray,
    size: int,
    symmetric: bool = True,
) -> SparseMatrix:
    """Scatter one reference element matrix through an element-to-dof map.

    Args:
        element_matrix: (k, k) element matrix shared by all elements
        connectivity: (n_elements, k) global indices; -1 entries are skipped
        size: Global matrix dimension

    Returns:
        Assembled square matrix
    """
    conn = np.asarray(connectivity, dtype=np.int64)
    k = element_matrix.shape[0]
    if conn.shape[1] != k:
        raise DimensionError("assemble_elements", k, conn.shape[1])
    local_i, local_j = np.nonzero(element_matrix)
    values = element_matrix[local_i, local_j]
    rows = conn[:, local_i]
    cols = conn[:, local_j]
    keep = (rows >= 0) & (cols >= 0)
    vals = np.broadcast_to(values, rows.shape)[keep]
    return SparseMatrix.from_triplets(rows[keep], cols[keep], vals, size, size, symmetric=symmetric)


def matvec(matrix: SparseMatrix, x: np.ndarray) -> np.ndarray:
    """Return y = M x, checking dimensions."""
    return matrix.matvec(x)


def stack_saddle(
    matrix: SparseMatrix,
    constraints: SparseMatrix,
) -> SparseMatrix:
    """Return the symmetric block matrix [[M, C^T], [C, 0]]."""
    if constraints.n_cols != matrix.n_cols:
        raise DimensionError("stack_saddle", matrix.n_cols, constraints.n_cols)
    if constraints.n_rows == 0:
        return matrix
    block = sp.bmat([[matrix.csr, constraints.csr.T], [constraints.csr, None]], format="csr")
    return SparseMatrix(block, symmetric=matrix.symmetric)
