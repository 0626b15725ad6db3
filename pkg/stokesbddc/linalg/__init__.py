"""Sparse storage, direct factorization and ILUT."""

from .factor import Factorization, factor, solve
from .ilut import IlutPrecon, ilut_apply, ilut_factor
from .sparse import SparseMatrix, assemble, assemble_elements, matvec

__all__ = [
    "SparseMatrix",
    "assemble",
    "assemble_elements",
    "matvec",
    "Factorization",
    "factor",
    "solve",
    "IlutPrecon",
    "ilut_factor",
    "ilut_apply",
]
