"""Structured hexahedral meshes of the unit cube.

Nodes live on a half-step lattice: a mesh with n elements per axis uses the
integer points of {0, ..., 2n}^3, where even coordinates are element vertices.
The number of odd coordinates of a lattice point gives its role (vertex, edge
midpoint, face centre, cell centre).
"""

from __future__ import annotations

from enum import Enum, IntEnum
from typing import Callable

import numpy as np

from ..errors import ValidationError
from ..logging import mesh_logger
from ..types import DofCounts

GEOMETRY_TOL = 1e-12


class ElementFamily(str, Enum):
    """Velocity/pressure element pair."""

    Q2Q1 = "q2q1"
    """Taylor-Hood: 27-node triquadratic velocity, trilinear pressure."""

    Q2S_Q1 = "q2s_q1"
    """20-node serendipity velocity, trilinear pressure."""

    @property
    def velocity_nodes(self) -> int:
        return 27 if self is ElementFamily.Q2Q1 else 20


class NodeRole(IntEnum):
    VERTEX = 0
    EDGE = 1
    FACE = 2
    CELL = 3


# Local node order (half-step offsets inside one element). Vertices and
# edges follow the VTK quadratic hexahedron; faces are x-, x+, y-, y+, z-, z+.
VERTEX_OFFSETS = np.array(
    [[0, 0, 0], [2, 0, 0], [2, 2, 0], [0, 2, 0], [0, 0, 2], [2, 0, 2], [2, 2, 2], [0, 2, 2]],
    dtype=np.int64,
)
EDGE_VERTICES = np.array(
    [[0, 1], [1, 2], [2, 3], [3, 0], [4, 5], [5, 6], [6, 7], [7, 4], [0, 4], [1, 5], [2, 6], [3, 7]],
    dtype=np.int64,
)
EDGE_OFFSETS = (VERTEX_OFFSETS[EDGE_VERTICES[:, 0]] + VERTEX_OFFSETS[EDGE_VERTICES[:, 1]]) // 2
FACE_OFFSETS = np.array(
    [[0, 1, 1], [2, 1, 1], [1, 0, 1], [1, 2, 1], [1, 1, 0], [1, 1, 2]], dtype=np.int64
)
CENTER_OFFSET = np.array([[1, 1, 1]], dtype=np.int64)
LOCAL_OFFSETS = np.vstack([VERTEX_OFFSETS, EDGE_OFFSETS, FACE_OFFSETS, CENTER_OFFSET])


class Mesh:
    """Uniform hexahedral mesh of [0,1]^3 with n elements per axis.

    Attributes:
        n: Elements per axis
        family: Element family
        h: Element edge length
        lattice: (n_nodes, 3) half-step lattice coordinates of velocity nodes
        coords: (n_nodes, 3) physical coordinates
        roles: (n_nodes,) NodeRole values
        elements: (n_elements, k) velocity node ids in local order
        element_origin: (n_elements, 3) element index triple (ex, ey, ez)
        pressure_nodes: (n_pressure,) velocity node id of each pressure node
        pressure_index: (n_nodes,) pressure node id, or -1
        element_pressure: (n_elements, 8) pressure node ids
    """

    def __init__(self, n: int, family: ElementFamily) -> None:
        if n < 1:
            raise ValidationError(f"mesh needs at least one element per axis, got {n}", "n")
        self.n = int(n)
        self.family = ElementFamily(family)
        self.h = 1.0 / n

        side = 2 * n + 1
        flat = np.arange(side**3, dtype=np.int64)
        lattice = np.stack([flat % side, (flat // side) % side, flat // side**2], axis=1)
        odd = (lattice % 2).sum(axis=1)
        keep = odd <= (3 if self.family is ElementFamily.Q2Q1 else 1)

        self._side = side
        self._lookup = np.full(side**3, -1, dtype=np.int64)
        self._lookup[keep] = np.arange(int(keep.sum()), dtype=np.int64)
        self.lattice = lattice[keep]
        self.coords = self.lattice * (self.h / 2.0)
        self.roles = odd[keep]

        e = np.arange(n**3, dtype=np.int64)
        self.element_origin = np.stack([e % n, (e // n) % n, e // n**2], axis=1)
        offsets = LOCAL_OFFSETS[: self.family.velocity_nodes]
        element_lattice = 2 * self.element_origin[:, None, :] + offsets[None, :, :]
        self.elements = self.node_at(element_lattice)

        vertex_side = n + 1
        v = np.arange(vertex_side**3, dtype=np.int64)
        vertex_grid = np.stack([v % vertex_side, (v // vertex_side) % vertex_side, v // vertex_side**2], axis=1)
        self.pressure_nodes = self.node_at(2 * vertex_grid)
        self.pressure_index = np.full(self.n_nodes, -1, dtype=np.int64)
        self.pressure_index[self.pressure_nodes] = np.arange(self.pressure_nodes.size)
        self.element_pressure = self.pressure_index[self.elements[:, :8]]

        mesh_logger.debug(
            f"Built {self.family.value} mesh: n={n}, {self.n_nodes} velocity nodes, "
            f"{self.n_pressure_nodes} pressure nodes"
        )

    @property
    def n_nodes(self) -> int:
        return int(self.lattice.shape[0])

    @property
    def n_pressure_nodes(self) -> int:
        return int(self.pressure_nodes.size)

    @property
    def n_elements(self) -> int:
        return int(self.elements.shape[0])

    @property
    def n_velocity_dofs(self) -> int:
        return 3 * self.n_nodes

    @property
    def n_dofs(self) -> int:
        return self.n_velocity_dofs + self.n_pressure_nodes

    def node_at(self, lattice_points: np.ndarray) -> np.ndarray:
        """Node ids of half-step lattice points (-1 where no node exists)."""
        pts = np.asarray(lattice_points, dtype=np.int64)
        side = self._side
        flat = pts[..., 0] + side * (pts[..., 1] + side * pts[..., 2])
        return self._lookup[flat]

    def pressure_dof(self, nodes: np.ndarray) -> np.ndarray:
        """Global pressure dof at velocity nodes (-1 where no pressure node)."""
        pid = self.pressure_index[np.asarray(nodes, dtype=np.int64)]
        return np.where(pid >= 0, self.n_velocity_dofs + pid, -1)

    def dof_map(self) -> np.ndarray:
        """(n_nodes, 4) map from (node, field) to global dof; field 3 is pressure."""
        nodes = np.arange(self.n_nodes, dtype=np.int64)
        vel = 3 * nodes[:, None] + np.arange(3)[None, :]
        return np.hstack([vel, self.pressure_dof(nodes)[:, None]])

    def dof_nodes(self) -> np.ndarray:
        """Velocity node id carrying each global dof."""
        vel = np.repeat(np.arange(self.n_nodes, dtype=np.int64), 3)
        return np.concatenate([vel, self.pressure_nodes])

    def dof_fields(self) -> np.ndarray:
        """Field (0, 1, 2 velocity; 3 pressure) of each global dof."""
        return np.concatenate(
            [np.tile(np.arange(3, dtype=np.int64), self.n_nodes), np.full(self.n_pressure_nodes, 3)]
        )

    def element_dofs(self) -> np.ndarray:
        """(n_elements, 3k + 8) global dofs in element-matrix order.

        Velocity dofs come node-major (x, y, z per node), then the eight
        pressure dofs at the vertices.
        """
        vel = (3 * self.elements[:, :, None] + np.arange(3)[None, None, :]).reshape(self.n_elements, -1)
        return np.hstack([vel, self.n_velocity_dofs + self.element_pressure])

    def boundary_nodes(self, predicate: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        """Ids of nodes whose coordinates satisfy a vectorized predicate.

        Args:
            predicate: Maps an (N, 3) coordinate array to an (N,) boolean mask

        Returns:
            Sorted node ids
        """
        mask = np.asarray(predicate(self.coords), dtype=bool)
        if mask.shape != (self.n_nodes,):
            raise ValidationError("predicate must return one boolean per node", "predicate")
        return np.flatnonzero(mask)

    def dof_count(self) -> DofCounts:
        return DofCounts(velocity=self.n_velocity_dofs, pressure=self.n_pressure_nodes)

    def center_vertex(self) -> int:
        """Node id of the vertex closest to the cube centre (exact for even n)."""
        half = 2 * (self.n // 2)
        return int(self.node_at(np.array([half, half, half])))

    def __repr__(self) -> str:
        return f"Mesh(n={self.n}, family={self.family.value}, nodes={self.n_nodes}, dofs={self.n_dofs})"


def build_structured_mesh(n: int, family: ElementFamily | str) -> Mesh:
    """Build the uniform n x n x n mesh of the unit cube."""
    return Mesh(n, ElementFamily(family))


def dof_count(mesh: Mesh) -> DofCounts:
    """Velocity, pressure and total dof counts."""
    return mesh.dof_count()


def boundary_nodes(mesh: Mesh, predicate: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    return mesh.boundary_nodes(predicate)


def on_plane(axis: int, value: float, tol: float = GEOMETRY_TOL) -> Callable[[np.ndarray], np.ndarray]:
    """Predicate selecting points with coordinate `axis` equal to `value`."""

    def predicate(coords: np.ndarray) -> np.ndarray:
        return np.abs(coords[:, axis] - value) <= tol

    return predicate


def on_any(*predicates: Callable[[np.ndarray], np.ndarray]) -> Callable[[np.ndarray], np.ndarray]:
    """Union of predicates."""

    def predicate(coords: np.ndarray) -> np.ndarray:
        mask = np.zeros(coords.shape[0], dtype=bool)
        for p in predicates:
            mask |= p(coords)
        return mask

    return predicate


def on_boundary(coords: np.ndarray) -> np.ndarray:
    """Predicate selecting all points on the cube surface."""
    return np.any((coords <= GEOMETRY_TOL) | (coords >= 1.0 - GEOMETRY_TOL), axis=1)


