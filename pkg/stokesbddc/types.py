"""Core data types and DTOs for stokesbddc."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np


@dataclass(frozen=True)
class DofCounts:
    """Degree-of-freedom counts of a mesh."""

    velocity: int
    """Number of velocity dofs (three per velocity node)."""

    pressure: int
    """Number of pressure dofs (one per element vertex)."""

    @property
    def total(self) -> int:
        return self.velocity + self.pressure


@dataclass
class KrylovResult:
    """Outcome of a Krylov solve.

    `residual_history` starts at 1.0 and holds relative residual norms: the
    recursive residual for PCG and BiCGStab (BiCGStab records both half
    steps), the minimised preconditioned residual for GMRES.
    `relative_residual` is always the true ||g - A x|| / ||g||.
    """

    solution: np.ndarray
    """Final iterate."""

    iterations: float
    """Completed iterations; BiCGStab counts half steps as 0.5."""

    relative_residual: float
    """True relative residual of the final iterate."""

    converged: bool
    """Whether the true relative residual reached the tolerance."""

    residual_history: List[float] = field(default_factory=list)
    """Relative residual per (half) iteration."""

    breakdown: bool = False
    """Set when the recurrence stopped on a breakdown."""

    negative_curvature: bool = False
    """PCG only: some search direction had p^T A p < 0."""

    message: str = ""
    """Human-readable stop reason."""


@dataclass
class SchurStats:
    """Work counters of a matrix-free Schur complement operator."""

    applications: int = 0
    """Number of S p products."""

    interior_solves: int = 0
    """Number of A11^{-1} solves (one per application and per rhs/recovery)."""

    matvecs: int = 0
    """Number of sparse block products."""


@dataclass
class RunReport:
    """Result of one benchmark run."""

    config: Dict[str, Any]
    """Echo of the run configuration."""

    unknowns: int
    """Total velocity + pressure dofs before eliminating Dirichlet data."""

    free_unknowns: int
    """Size of the reduced saddle-point system."""

    iterations: float
    """Krylov iterations (half steps count 0.5 for BiCGStab)."""

    converged: bool
    """Krylov convergence flag."""

    final_rel_res: float
    """True relative residual of the iterated system."""

    full_rel_res: float = float("nan")
    """True relative residual of the reduced saddle-point system after recovery."""

    verified: bool = False
    """True when full_rel_res < 10 * tol."""

    mass_balance: float = float("nan")
    """Max |residual| over the divergence rows, relative to ||f||."""

    interface_size: int = 0
    virtual_size: int = 0
    n_constraints: int = 0
    n_corners: int = 0
    ilut_shift: float = 0.0
    ilut_nnz: int = 0
    direct_error: Optional[float] = None
    """Relative max-norm distance to the monolithic direct solution, when requested."""

    residual_history: List[float] = field(default_factory=list)
    timings: Dict[str, float] = field(default_factory=dict)
    """Phase timings in milliseconds."""

    solution_digest: str = ""
    """XXH3 digest of the recovered reduced solution."""

    error: Optional[str] = None
    """Error message when the run failed."""

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


LinearMap = Callable[[np.ndarray], np.ndarray]
"""Matrix-free operator: vector in, vector out."""
