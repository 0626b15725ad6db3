"""BDDC preconditioner in global-matrix form.

The virtual mesh keeps one copy of every non-corner interface dof per
subdomain, while interior and corner dofs stay single. The assembled virtual
matrix A~ couples subdomains only through corners. Optional edge and face
constraints tie the velocity averages of the copies together through
Lagrange multipliers, optionally the pressure averages too. One
preconditioner application is

    v = E [A~, C^T; C, 0]^{-1} E^T r

with E averaging the copies back onto the original dofs with weights
1/multiplicity.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
import scipy.sparse as sp

from ..errors import (
    CoarseProblemError,
    DimensionError,
    FactorizationStateError,
    SingularMatrixError,
    ValidationError,
)
from ..fem.stokes import SaddleSystem
from ..linalg.factor import Factorization, factor
from ..linalg.sparse import SparseMatrix, assemble_elements, stack_saddle
from ..logging import bddc_logger
from ..utils.time import time_ms
from .decomp import Decomposition, Glob

VELOCITY_FIELDS: Tuple[int, ...] = (0, 1, 2)
PRESSURE_FIELD = 3


class ConstraintSet(str, Enum):
    """Primal constraints: corners always, plus edge and/or face averages."""

    C = "c"
    CE = "ce"
    CF = "cf"
    CEF = "cef"

    @classmethod
    def parse(cls, value: "str | ConstraintSet") -> ConstraintSet:
        if isinstance(value, ConstraintSet):
            return value
        key = str(value).lower().replace("+", "").replace(" ", "")
        try:
            return cls(key)
        except ValueError:
            raise ValidationError(f"unknown constraint set '{value}'", "constraints") from None

    @property
    def edges(self) -> bool:
        return "e" in self.value

    @property
    def faces(self) -> bool:
        return "f" in self.value

    @property
    def label(self) -> str:
        return "+".join(self.value)


class VirtualSystem:
    """Virtual (partially torn) matrix, constraints and their factorization.

    Attributes:
        matrix: A~ over virtual dofs
        constraints: C, one row per (glob, field, extra copy)
        virtual_dof: Original reduced index of each virtual dof
        virtual_subdomain: Owning subdomain of each torn copy, -1 for shared dofs
        connectivity: (n_elements, k) element -> virtual dof map (-1 for fixed)
    """

    def __init__(
        self,
        matrix: SparseMatrix,
        constraints: SparseMatrix,
        virtual_dof: np.ndarray,
        virtual_subdomain: np.ndarray,
        connectivity: np.ndarray,
        constraint_set: ConstraintSet,
    ) -> None:
        self.matrix = matrix
        self.constraints = constraints
        self.virtual_dof = virtual_dof
        self.virtual_subdomain = virtual_subdomain
        self.connectivity = connectivity
        self.constraint_set = constraint_set
        self.factorization: Optional[Factorization] = None

    @property
    def n_virtual(self) -> int:
        return int(self.virtual_dof.size)

    @property
    def n_constraints(self) -> int:
        return self.constraints.n_rows

    def factorize(self) -> None:
        """Factor [[A~, C^T], [C, 0]].

        Raises:
            CoarseProblemError: If the augmented matrix is singular
        """
        augmented = stack_saddle(self.matrix, self.constraints)
        try:
            with time_ms() as timer:
                self.factorization = factor(augmented, "symmetric-indefinite")
        except SingularMatrixError as e:
            raise CoarseProblemError(self.constraint_set.label, e.pivot_index) from e
        bddc_logger.info(
            f"Factored augmented virtual matrix ({self.n_virtual} + {self.n_constraints}) "
            f"in {timer.elapsed_ms:.1f}ms"
        )

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Virtual part of the augmented solve with zero constraint data."""
        if self.factorization is None:
            raise FactorizationStateError("virtual system has not been factored")
        if rhs.shape != (self.n_virtual,):
            raise DimensionError("virtual solve", self.n_virtual, rhs.shape)
        full = np.concatenate([rhs, np.zeros(self.n_constraints)])
        return self.factorization.solve(full)[: self.n_virtual]

    def subdomain_virtual_dofs(self, elements: np.ndarray) -> np.ndarray:
        """Virtual dofs touched by the given elements."""
        touched = self.connectivity[elements].ravel()
        return np.unique(touched[touched >= 0])


@dataclass
class AveragingOperator:
    """Averaging E (original x virtual) and copy injection R (virtual x original).

    Attributes:
        matrix: E with E[i, v] = 1 / copies(i) for every copy v of i
        injection: R with R[v, i] = 1 when v is a copy of i
        interface: Reduced indices of the interface block
    """

    matrix: sp.csr_matrix
    injection: sp.csr_matrix
    interface: np.ndarray

    def average(self, w: np.ndarray) -> np.ndarray:
        return np.asarray(self.matrix @ w)

    def scatter(self, r: np.ndarray) -> np.ndarray:
        """E^T r."""
        return np.asarray(self.matrix.T @ r)

    def inject(self, u: np.ndarray) -> np.ndarray:
        return np.asarray(self.injection @ u)


def _virtual_keys(
    system: SaddleSystem,
    decomposition: Decomposition,
) -> np.ndarray:
    """Per (element, local dof) key identifying its virtual dof, -1 if fixed.

    Shared dofs (interior or corner) key on their reduced index; torn copies on
    (subdomain + 1) * n_free + reduced index.
    """
    mesh = system.mesh
    n_free = system.n_free
    conn = system.full_to_free[mesh.element_dofs()]

    nodes = mesh.dof_nodes()[system.free_dofs]
    torn_node = decomposition.node_multiplicity >= 2
    torn_node[decomposition.corners] = False
    torn = torn_node[nodes]

    owner = (decomposition.element_subdomain + 1)[:, None]
    keys = np.where(torn[np.maximum(conn, 0)], owner * n_free + conn, conn)
    return np.where(conn >= 0, keys, -1)


def _constraint_rows(
    globs: List[Glob],
    system: SaddleSystem,
    unique_keys: np.ndarray,
    fields: Tuple[int, ...],
) -> sp.csr_matrix:
    mesh = system.mesh
    n_free = system.n_free
    dof_map = mesh.dof_map()
    rows, cols, vals = [], [], []
    row = 0
    for glob in globs:
        for field in fields:
            dofs = dof_map[glob.nodes, field]
            dofs = system.full_to_free[dofs[dofs >= 0]]
            dofs = dofs[dofs >= 0]
            if dofs.size == 0:
                continue
            weight = 1.0 / dofs.size
            first = np.searchsorted(unique_keys, (glob.subdomains[0] + 1) * n_free + dofs)
            for s in glob.subdomains[1:]:
                other = np.searchsorted(unique_keys, (s + 1) * n_free + dofs)
                rows.append(np.full(2 * dofs.size, row))
                cols.append(np.concatenate([first, other]))
                vals.append(np.concatenate([np.full(dofs.size, weight), np.full(dofs.size, -weight)]))
                row += 1
    if row == 0:
        return sp.csr_matrix((0, unique_keys.size))
    return sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(row, unique_keys.size),
    )


def build_virtual_system(
    system: SaddleSystem,
    decomposition: Decomposition,
    constraints: "ConstraintSet | str" = ConstraintSet.C,
    factorize: bool = True,
    average_pressure: bool = False,
) -> VirtualSystem:
    """Assemble A~ and C for a decomposition and constraint set.

    Args:
        system: Reduced saddle-point system
        decomposition: Partition with its corners and globs
        constraints: Which averages to enforce besides corners
        factorize: Factor the augmented matrix right away
        average_pressure: Add a pressure average row per glob next to the
            three velocity rows

    Raises:
        CoarseProblemError: If the augmented matrix is singular
    """
    constraint_set = ConstraintSet.parse(constraints)
    n_free = system.n_free

    with time_ms() as timer:
        keys = _virtual_keys(system, decomposition)
        valid = keys >= 0
        unique_keys, inverse = np.unique(keys[valid], return_inverse=True)
        connectivity = np.full(keys.shape, -1, dtype=np.int64)
        connectivity[valid] = inverse

        matrix = assemble_elements(system.element_matrix, connectivity, unique_keys.size, symmetric=True)
        virtual_dof = unique_keys % n_free
        virtual_subdomain = unique_keys // n_free - 1

        globs = decomposition.globs
        selected: List[Glob] = []
        if constraint_set.edges:
            selected.extend(globs.edges)
        if constraint_set.faces:
            selected.extend(globs.faces)
        fields = VELOCITY_FIELDS + ((PRESSURE_FIELD,) if average_pressure else ())
        C = SparseMatrix(_constraint_rows(selected, system, unique_keys, fields))

    vs = VirtualSystem(matrix, C, virtual_dof, virtual_subdomain, connectivity, constraint_set)
    bddc_logger.info(
        f"Virtual system ({constraint_set.label}): {vs.n_virtual} virtual dofs for "
        f"{n_free} free dofs, {vs.n_constraints} constraints, built in {timer.elapsed_ms:.1f}ms"
    )
    if factorize:
        vs.factorize()
    return vs


def build_averaging_operator(vs: VirtualSystem, system: SaddleSystem) -> AveragingOperator:
    """Averaging and injection operators between virtual and reduced dofs."""
    n_free = system.n_free
    copies = np.bincount(vs.virtual_dof, minlength=n_free).astype(np.float64)
    cols = np.arange(vs.n_virtual)
    E = sp.csr_matrix((1.0 / copies[vs.virtual_dof], (vs.virtual_dof, cols)), shape=(n_free, vs.n_virtual))
    R = sp.csr_matrix((np.ones(vs.n_virtual), (cols, vs.virtual_dof)), shape=(vs.n_virtual, n_free))
    if system.interface is None:
        raise ValidationError("system has no interior/interface split; run split_blocks first", "system")
    return AveragingOperator(matrix=E, injection=R, interface=system.interface)


def apply_bddc(vs: VirtualSystem, averaging: AveragingOperator, r: np.ndarray) -> np.ndarray:
    """v = (E A~_C^{-1} E^T r) restricted to the interface.

    Args:
        vs: Factored virtual system
        averaging: Averaging operator of the same system
        r: Interface residual

    Raises:
        FactorizationStateError: If `vs` holds no factorization
    """
    interface = averaging.interface
    if r.shape != (interface.size,):
        raise DimensionError("apply_bddc", interface.size, r.shape)
    full = np.zeros(averaging.matrix.shape[0])
    full[interface] = r
    w = vs.solve(averaging.scatter(full))
    return averaging.average(w)[interface]


class BddcPreconditioner:
    """Callable BDDC preconditioner on the interface Schur system."""

    def __init__(self, vs: VirtualSystem, averaging: AveragingOperator) -> None:
        self.vs = vs
        self.averaging = averaging
        self.applications = 0

    @classmethod
    def build(
        cls,
        system: SaddleSystem,
        decomposition: Decomposition,
        constraints: "ConstraintSet | str" = ConstraintSet.C,
        average_pressure: bool = False,
    ) -> BddcPreconditioner:
        vs = build_virtual_system(system, decomposition, constraints, average_pressure=average_pressure)
        return cls(vs, build_averaging_operator(vs, system))

    def apply(self, r: np.ndarray) -> np.ndarray:
        self.applications += 1
        return apply_bddc(self.vs, self.averaging, r)

    def __call__(self, r: np.ndarray) -> np.ndarray:
        return self.apply(r)
