"""Static condensation onto the subdomain interface.

With the reduced system split into interior (1) and interface (2) blocks,
the interface problem is S u2 = g2 where

    S  = A22 - A21 A11^{-1} A12
    g2 = f2  - A21 A11^{-1} f1

A11 is block diagonal over subdomains and is factored block by block; S is
never formed.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import List

import numpy as np
from tqdm import tqdm

from ..errors import DimensionError, InteriorFactorError, SingularMatrixError
from ..fem.stokes import SaddleSystem
from ..linalg.factor import Factorization, factor
from ..logging import substructure_logger
from ..types import SchurStats
from ..utils.time import time_ms
from .decomp import BlockSplit, Decomposition, split_blocks


class InteriorFactors:
    """Factorizations of the per-subdomain diagonal blocks of A11.

    Attributes:
        split: Interior/interface split the blocks were taken from
        blocks: Positions within the interior vector for each subdomain
        factors: One factorization per subdomain (possibly empty)
    """

    def __init__(self, split: BlockSplit, blocks: List[np.ndarray], factors: List[Factorization]) -> None:
        self.split = split
        self.blocks = blocks
        self.factors = factors
        self.solves = 0

    @property
    def n_interior(self) -> int:
        return int(self.split.interior.size)

    def __len__(self) -> int:
        return len(self.factors)

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Apply A11^{-1} to a vector indexed by interior dofs."""
        rhs = np.asarray(rhs, dtype=np.float64)
        if rhs.shape != (self.n_interior,):
            raise DimensionError("interior solve", self.n_interior, rhs.shape)
        out = np.zeros_like(rhs)
        for positions, fac in zip(self.blocks, self.factors):
            if positions.size:
                out[positions] = fac.solve(rhs[positions])
        self.solves += 1
        return out


def factor_interiors(
    system: SaddleSystem,
    decomposition: Decomposition,
    workers: int = 1,
    progress: bool = False,
) -> InteriorFactors:
    """Factor the interior block of every subdomain.

    Args:
        system: Reduced saddle-point system
        decomposition: Partition the interior blocks follow
        workers: Thread count (<= 1 runs serially); results keep subdomain order
        progress: Show a tqdm bar

    Raises:
        InteriorFactorError: If a subdomain block is singular
    """
    split = split_blocks(system, decomposition)
    A = system.matrix
    blocks = [split.subdomain_positions(s) for s in range(decomposition.n_subdomains)]

    def _factor(s: int) -> Factorization:
        rows = split.interior[blocks[s]]
        try:
            return factor(A.submatrix(rows), "symmetric-indefinite")
        except SingularMatrixError as e:
            raise InteriorFactorError(s, e.pivot_index) from e

    subdomains = range(decomposition.n_subdomains)
    with time_ms() as timer:
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                iterator = pool.map(_factor, subdomains)
                factors = list(tqdm(iterator, total=len(subdomains), desc="Factoring", disable=not progress))
        else:
            factors = [_factor(s) for s in tqdm(subdomains, desc="Factoring", disable=not progress)]

    substructure_logger.info(
        f"Factored {len(factors)} interior blocks ({split.interior.size} dofs, "
        f"{sum(f.nnz_factors for f in factors)} factor nonzeros) in {timer.elapsed_ms:.1f}ms"
    )
    return InteriorFactors(split, blocks, factors)


class SchurOperator:
    """Matrix-free interface Schur complement S = A22 - A21 A11^{-1} A12."""

    def __init__(self, system: SaddleSystem, factors: InteriorFactors) -> None:
        split = factors.split
        A = system.matrix
        self.factors = factors
        self.a12 = A.submatrix(split.interior, split.interface)
        self.a21 = A.submatrix(split.interface, split.interior)
        self.a22 = A.submatrix(split.interface)
        self._applications = 0
        self._solves_at_start = factors.solves

    @property
    def size(self) -> int:
        return self.a22.n_rows

    @property
    def stats(self) -> SchurStats:
        """Work done since construction, read from the block and factor counters."""
        return SchurStats(
            applications=self._applications,
            interior_solves=self.factors.solves - self._solves_at_start,
            matvecs=self.a12.matvecs + self.a21.matvecs + self.a22.matvecs,
        )

    def apply(self, p: np.ndarray) -> np.ndarray:
        """Return S p."""
        p = np.asarray(p, dtype=np.float64)
        if p.shape != (self.size,):
            raise DimensionError("schur_apply", self.size, p.shape)
        w = self.factors.solve(self.a12.matvec(p))
        self._applications += 1
        return self.a22.matvec(p) - self.a21.matvec(w)

    def __call__(self, p: np.ndarray) -> np.ndarray:
        return self.apply(p)

    def to_dense(self) -> np.ndarray:
        """Dense S built column by column (small problems and tests only)."""
        eye = np.eye(self.size)
        return np.column_stack([self.apply(eye[:, j]) for j in range(self.size)])


def schur_apply(operator: SchurOperator, p: np.ndarray) -> np.ndarray:
    return operator.apply(p)


def condensed_rhs(system: SaddleSystem, factors: InteriorFactors) -> np.ndarray:
    """g2 = f2 - A21 A11^{-1} f1."""
    split = factors.split
    A = system.matrix
    f1 = system.rhs[split.interior]
    f2 = system.rhs[split.interface]
    return f2 - A.submatrix(split.interface, split.interior).matvec(factors.solve(f1))


def recover_interior(
    factors: InteriorFactors,
    system: SaddleSystem,
    u_interface: np.ndarray,
) -> np.ndarray:
    """Full reduced solution from interface values: u1 = A11^{-1}(f1 - A12 u2)."""
    split = factors.split
    if u_interface.shape != (split.interface.size,):
        raise DimensionError("recover_interior", split.interface.size, u_interface.shape)
    A = system.matrix
    f1 = system.rhs[split.interior]
    u1 = factors.solve(f1 - A.submatrix(split.interior, split.interface).matvec(u_interface))
    u = np.zeros(system.n_free)
    u[split.interior] = u1
    u[split.interface] = u_interface
    return u


def solve_monolithic(system: SaddleSystem) -> np.ndarray:
    """Direct solve of the whole reduced system (reference solution)."""
    with time_ms() as timer:
        x = factor(system.matrix, "symmetric-indefinite").solve(system.rhs)
    substructure_logger.info(f"Monolithic direct solve of {system.n_free} unknowns in {timer.elapsed_ms:.1f}ms")
    return x
