"""Stokes problem definition and saddle-point assembly.

The discrete system is [[A, B^T], [B, 0]] [u; p] = [f; 0] with A the viscous
block and B = -div. Dirichlet velocity dofs and one pinned pressure dof are
eliminated, leaving a symmetric indefinite reduced system.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from ..errors import ValidationError
from ..linalg.sparse import SparseMatrix, assemble_elements
from ..logging import assembly_logger
from ..utils.time import time_ms
from .elements import element_load, element_matrices, saddle_element_matrix
from .mesh import ElementFamily, Mesh, build_structured_mesh, on_any, on_plane

LID_ANGLE = math.pi / 8.0

BodyForce = Callable[[np.ndarray], np.ndarray]


@dataclass
class StokesProblem:
    """Boundary data and coefficients of a Stokes problem on a mesh."""

    viscosity: float
    """Kinematic viscosity (> 0)."""

    dirichlet: Dict[int, float] = field(default_factory=dict)
    """Global velocity dof -> prescribed value."""

    pinned_pressure_node: int = -1
    """Velocity node id of the vertex whose pressure is fixed."""

    pinned_pressure_value: float = 0.0

    body_force: Optional[BodyForce] = None
    """Maps (M, 3) coordinates to (M, 3) force values; None means zero."""

    name: str = "custom"

    def __post_init__(self) -> None:
        if not self.viscosity > 0.0:
            raise ValidationError(f"viscosity must be positive, got {self.viscosity}", "viscosity")

    def constrain(
        self,
        nodes: np.ndarray,
        value: Sequence[float],
        fields: Sequence[int] = (0, 1, 2),
        overwrite: bool = True,
    ) -> None:
        """Prescribe velocity components at nodes.

        Args:
            nodes: Velocity node ids
            value: Three velocity components; only `fields` are used
            fields: Components to constrain
            overwrite: Replace existing entries; otherwise keep them
        """
        for node in np.asarray(nodes, dtype=np.int64):
            for f in fields:
                dof = 3 * int(node) + int(f)
                if overwrite or dof not in self.dirichlet:
                    self.dirichlet[dof] = float(value[f])


@dataclass
class SaddleSystem:
    """Reduced saddle-point system with the bookkeeping to map back.

    Attributes:
        matrix: Reduced symmetric indefinite matrix over free dofs
        rhs: Reduced right-hand side (load minus lifted Dirichlet data)
        free_dofs: Reduced index -> global dof
        full_to_free: Global dof -> reduced index, or -1 for fixed dofs
        fixed_values: Global vector holding prescribed values (zero elsewhere)
        interior / interface: Reduced indices of the block split, once set
    """

    mesh: Mesh
    problem: StokesProblem
    matrix: SparseMatrix
    rhs: np.ndarray
    free_dofs: np.ndarray
    full_to_free: np.ndarray
    fixed_values: np.ndarray
    full_matrix: SparseMatrix
    full_rhs: np.ndarray
    element_matrix: np.ndarray
    interior: Optional[np.ndarray] = None
    interface: Optional[np.ndarray] = None

    @property
    def n_free(self) -> int:
        return int(self.free_dofs.size)

    @property
    def pressure_mask(self) -> np.ndarray:
        """Boolean mask of reduced indices that are pressure dofs."""
        return self.free_dofs >= self.mesh.n_velocity_dofs

    def expand(self, reduced: np.ndarray) -> np.ndarray:
        """Global solution vector from a reduced one (fixed dofs filled in)."""
        full = self.fixed_values.copy()
        full[self.free_dofs] = reduced
        return full

    def split_fields(self, full: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """(n_nodes, 3) velocity and (n_pressure,) pressure from a global vector."""
        nv = self.mesh.n_velocity_dofs
        return full[:nv].reshape(-1, 3), full[nv:]

    def residual(self, reduced: np.ndarray) -> np.ndarray:
        return self.rhs - self.matrix.matvec(reduced)


def assemble_system(mesh: Mesh, problem: StokesProblem, n_quad: int = 3) -> SaddleSystem:
    """Assemble the Stokes saddle-point system and eliminate fixed dofs.

    Args:
        mesh: Structured mesh
        problem: Viscosity, Dirichlet data, pressure pin and body force
        n_quad: Gauss points per direction

    Returns:
        Reduced system with its mapping data

    Raises:
        ValidationError: If a Dirichlet dof is not a velocity dof or the
            pinned node carries no pressure
    """
    nv = mesh.n_velocity_dofs
    dirichlet_dofs = np.fromiter(problem.dirichlet.keys(), dtype=np.int64, count=len(problem.dirichlet))
    if dirichlet_dofs.size and (dirichlet_dofs.min() < 0 or dirichlet_dofs.max() >= nv):
        raise ValidationError("Dirichlet entry does not reference a velocity dof", "dirichlet")
    pin = int(problem.pinned_pressure_node)
    if not 0 <= pin < mesh.n_nodes or mesh.pressure_index[pin] < 0:
        raise ValidationError(f"node {pin} carries no pressure dof", "pinned_pressure_node")

    with time_ms() as timer:
        A_e, B_e = element_matrices(mesh.h, mesh.family, problem.viscosity, n_quad)
        K_e = saddle_element_matrix(A_e, B_e)
        conn = mesh.element_dofs()
        full = assemble_elements(K_e, conn, mesh.n_dofs, symmetric=True)

        load = np.zeros(mesh.n_dofs)
        if problem.body_force is not None:
            origins = mesh.element_origin * mesh.h
            f_e = element_load(mesh.h, mesh.family, origins, problem.body_force, n_quad)
            np.add.at(load, conn[:, : f_e.shape[1]], f_e)

        fixed = np.zeros(mesh.n_dofs, dtype=bool)
        values = np.zeros(mesh.n_dofs)
        if dirichlet_dofs.size:
            fixed[dirichlet_dofs] = True
            values[dirichlet_dofs] = np.fromiter(problem.dirichlet.values(), dtype=np.float64)
        pin_dof = int(mesh.pressure_dof(np.array([pin]))[0])
        fixed[pin_dof] = True
        values[pin_dof] = problem.pinned_pressure_value

        free = np.flatnonzero(~fixed)
        full_to_free = np.full(mesh.n_dofs, -1, dtype=np.int64)
        full_to_free[free] = np.arange(free.size)

        csr = full.csr
        reduced = csr[free][:, free]
        rhs = load[free] - csr[free] @ values

    assembly_logger.info(
        f"Assembled {mesh.family.value} system: {mesh.n_dofs} dofs, {free.size} free, "
        f"nnz={reduced.nnz} in {timer.elapsed_ms:.1f}ms"
    )

    return SaddleSystem(
        mesh=mesh,
        problem=problem,
        matrix=SparseMatrix(reduced, symmetric=True),
        rhs=np.asarray(rhs, dtype=np.float64),
        free_dofs=free,
        full_to_free=full_to_free,
        fixed_values=values,
        full_matrix=full,
        full_rhs=load,
        element_matrix=K_e,
    )


def _check_even(n: int) -> None:
    if n < 2 or n % 2:
        raise ValidationError(f"n must be even and at least 2, got {n}", "n")


def define_problem_1(n: int, viscosity: float = 0.01) -> Tuple[Mesh, StokesProblem]:
    """Leaky lid-driven cavity on serendipity elements.

    Walls x=0, x=1 and y=0 are no-slip, the faces z=0 and z=1 only block the
    normal component, and every node on y=1 (edges included) moves with
    u = (1, 0, 0). Pressure is pinned at the centre vertex.
    """
    _check_even(n)
    mesh = build_structured_mesh(n, ElementFamily.Q2S_Q1)
    problem = StokesProblem(viscosity=viscosity, name="leaky-cavity")

    walls = mesh.boundary_nodes(on_any(on_plane(0, 0.0), on_plane(0, 1.0), on_plane(1, 0.0)))
    problem.constrain(walls, (0.0, 0.0, 0.0))
    lid = mesh.boundary_nodes(on_plane(1, 1.0))
    problem.constrain(lid, (1.0, 0.0, 0.0))
    slip = mesh.boundary_nodes(on_any(on_plane(2, 0.0), on_plane(2, 1.0)))
    problem.constrain(slip, (0.0, 0.0, 0.0), fields=(2,), overwrite=False)

    problem.pinned_pressure_node = mesh.center_vertex()
    return mesh, problem


def define_problem_2(n: int, viscosity: float = 0.01) -> Tuple[Mesh, StokesProblem]:
    """Closed cavity on Taylor-Hood elements with a lid moving at pi/8 to x.

    All walls are no-slip; the lid y=1 (edges included) moves with
    u = (cos(pi/8), 0, sin(pi/8)).
    """
    _check_even(n)
    mesh = build_structured_mesh(n, ElementFamily.Q2Q1)
    problem = StokesProblem(viscosity=viscosity, name="rotated-lid-cavity")

    walls = mesh.boundary_nodes(
        on_any(on_plane(0, 0.0), on_plane(0, 1.0), on_plane(1, 0.0), on_plane(2, 0.0), on_plane(2, 1.0))
    )
    problem.constrain(walls, (0.0, 0.0, 0.0))
    lid = mesh.boundary_nodes(on_plane(1, 1.0))
    problem.constrain(lid, (math.cos(LID_ANGLE), 0.0, math.sin(LID_ANGLE)))

    problem.pinned_pressure_node = mesh.center_vertex()
    return mesh, problem


def define_problem(problem: int, n: int) -> Tuple[Mesh, StokesProblem]:
    """Benchmark problem 1 or 2 on an n x n x n mesh."""
    if problem == 1:
        return define_problem_1(n)
    if problem == 2:
        return define_problem_2(n)
    raise ValidationError(f"unknown problem {problem}", "problem")
