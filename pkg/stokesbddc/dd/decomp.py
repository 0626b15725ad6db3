"""Regular box partitions of a structured mesh and interface classification.

Elements are grouped into m x m x m boxes. A node's sharing set is the set of
boxes whose elements contain it; nodes shared by two or more boxes form the
interface. Interface nodes with identical sharing sets form a glob: two owners
make a face, three or more an edge. Corner nodes are taken out of the globs.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Dict, List, Tuple

import numpy as np
import scipy.sparse as sp

from ..errors import ValidationError
from ..fem.mesh import Mesh, NodeRole
from ..fem.stokes import SaddleSystem
from ..logging import decomp_logger


class GlobKind(str, Enum):
    CORNER = "corner"
    EDGE = "edge"
    FACE = "face"


@dataclass(frozen=True)
class Glob:
    """Interface nodes sharing one exact set of subdomains."""

    kind: GlobKind
    subdomains: Tuple[int, ...]
    nodes: np.ndarray

    def __len__(self) -> int:
        return int(self.nodes.size)


@dataclass
class GlobSet:
    """Corner nodes plus edge and face globs (corners excluded)."""

    corners: np.ndarray
    edges: List[Glob]
    faces: List[Glob]

    @property
    def all_globs(self) -> List[Glob]:
        return self.edges + self.faces


@dataclass
class BlockSplit:
    """Interior/interface split of the reduced system.

    Attributes:
        interior: Reduced indices of interior dofs (ascending)
        interface: Reduced indices of interface dofs (ascending)
        interior_subdomain: Owning subdomain of each interior dof
    """

    interior: np.ndarray
    interface: np.ndarray
    interior_subdomain: np.ndarray

    def subdomain_positions(self, s: int) -> np.ndarray:
        """Positions within `interior` owned by subdomain s."""
        return np.flatnonzero(self.interior_subdomain == s)


class Decomposition:
    """Regular m x m x m partition of a mesh.

    Attributes:
        mesh: Partitioned mesh
        m: Boxes per axis
        H: Elements per box per axis
        element_subdomain: (n_elements,) box of each element
        incidence: (n_nodes, n_subdomains) 0/1 CSR node-box incidence
        node_multiplicity: (n_nodes,) number of boxes containing each node
    """

    def __init__(self, mesh: Mesh, m: int) -> None:
        if m < 1 or mesh.n % m:
            raise ValidationError(f"m={m} must divide n={mesh.n}", "m")
        self.mesh = mesh
        self.m = int(m)
        self.H = mesh.n // m

        box = mesh.element_origin // self.H
        self.element_subdomain = box[:, 0] + m * (box[:, 1] + m * box[:, 2])

        k = mesh.elements.shape[1]
        rows = mesh.elements.ravel()
        cols = np.repeat(self.element_subdomain, k)
        inc = sp.csr_matrix(
            (np.ones(rows.size), (rows, cols)), shape=(mesh.n_nodes, self.n_subdomains)
        )
        inc.sum_duplicates()
        inc.data[:] = 1.0
        self.incidence = inc
        self.node_multiplicity = np.diff(inc.indptr).astype(np.int64)

    @property
    def n_subdomains(self) -> int:
        return self.m**3

    def sharing_set(self, node: int) -> Tuple[int, ...]:
        inc = self.incidence
        return tuple(int(s) for s in inc.indices[inc.indptr[node] : inc.indptr[node + 1]])

    @property
    def interface_nodes(self) -> np.ndarray:
        return np.flatnonzero(self.node_multiplicity >= 2)

    @property
    def node_owner(self) -> np.ndarray:
        """Owning box of interior nodes; -1 on the interface."""
        inc = self.incidence
        owner = np.full(self.mesh.n_nodes, -1, dtype=np.int64)
        single = self.node_multiplicity == 1
        owner[single] = inc.indices[inc.indptr[:-1][single]]
        return owner

    def subdomain_elements(self, s: int) -> np.ndarray:
        return np.flatnonzero(self.element_subdomain == s)

    @cached_property
    def sharing_classes(self) -> Dict[Tuple[int, ...], np.ndarray]:
        """Interface nodes grouped by exact sharing set (corners included)."""
        inc = self.incidence
        groups: Dict[Tuple[int, ...], List[int]] = {}
        for node in self.interface_nodes:
            key = tuple(int(s) for s in inc.indices[inc.indptr[node] : inc.indptr[node + 1]])
            groups.setdefault(key, []).append(int(node))
        return {key: np.asarray(nodes, dtype=np.int64) for key, nodes in sorted(groups.items())}

    @cached_property
    def globs(self) -> GlobSet:
        return classify_globs(self)

    @property
    def corners(self) -> np.ndarray:
        return self.globs.corners

    def __repr__(self) -> str:
        return f"Decomposition(m={self.m}, H={self.H}, subdomains={self.n_subdomains})"


def partition_regular(mesh: Mesh, m: int) -> Decomposition:
    """Split the mesh into m^3 equal boxes.

    Raises:
        ValidationError: If m does not divide n
    """
    decomposition = Decomposition(mesh, m)
    decomp_logger.info(
        f"Partitioned n={mesh.n} mesh into {decomposition.n_subdomains} boxes "
        f"(H/h={decomposition.H}), {decomposition.interface_nodes.size} interface nodes"
    )
    return decomposition


def _spans_plane(points: np.ndarray) -> bool:
    """At least three points, not all on one line."""
    if points.shape[0] < 3:
        return False
    return int(np.linalg.matrix_rank(points[1:] - points[0], tol=1e-9)) >= 2


def select_corners(decomposition: Decomposition) -> np.ndarray:
    """Corner nodes: box-lattice vertices on the interface, augmented per face.

    Every face glob ends up with at least three non-collinear corners among the
    nodes shared by its two boxes. Missing ones are taken greedily from the
    face's element vertices, farthest from the corners already chosen.

    Returns:
        Sorted corner node ids
    """
    mesh = decomposition.mesh
    step = 2 * decomposition.H
    on_box_lattice = np.all(mesh.lattice % step == 0, axis=1)
    corner_mask = on_box_lattice & (decomposition.node_multiplicity >= 2)

    inc = decomposition.incidence
    promoted = 0
    for key, nodes in decomposition.sharing_classes.items():
        if len(key) != 2:
            continue
        a, b = key
        both = np.asarray((inc[:, a].multiply(inc[:, b])).todense()).ravel() > 0
        chosen = np.flatnonzero(corner_mask & both)
        points = mesh.coords[chosen]
        if _spans_plane(points):
            continue
        candidates = nodes[mesh.roles[nodes] == NodeRole.VERTEX]
        candidates = candidates[~corner_mask[candidates]]
        while not _spans_plane(points) and candidates.size:
            if points.shape[0] == 0:
                pick = 0
            else:
                dist = np.min(
                    np.linalg.norm(mesh.coords[candidates][:, None, :] - points[None, :, :], axis=2),
                    axis=1,
                )
                if points.shape[0] >= 2:
                    # prefer points off the line through the current corners
                    trial = [_spans_plane(np.vstack([points, mesh.coords[c]])) for c in candidates]
                    dist = np.where(trial, dist, -1.0)
                pick = int(np.argmax(dist))
            node = candidates[pick]
            corner_mask[node] = True
            promoted += 1
            points = np.vstack([points, mesh.coords[node]])
            candidates = np.delete(candidates, pick)

    if promoted:
        decomp_logger.debug(f"Promoted {promoted} face nodes to corners")
    return np.flatnonzero(corner_mask)


def classify_globs(decomposition: Decomposition) -> GlobSet:
    """Group interface nodes into corners, edge globs and face globs."""
    corners = select_corners(decomposition)
    is_corner = np.zeros(decomposition.mesh.n_nodes, dtype=bool)
    is_corner[corners] = True

    edges: List[Glob] = []
    faces: List[Glob] = []
    for key, nodes in decomposition.sharing_classes.items():
        rest = nodes[~is_corner[nodes]]
        if rest.size == 0:
            continue
        if len(key) == 2:
            faces.append(Glob(GlobKind.FACE, key, rest))
        else:
            edges.append(Glob(GlobKind.EDGE, key, rest))

    decomp_logger.info(
        f"Interface globs: {corners.size} corners, {len(edges)} edges, {len(faces)} faces"
    )
    return GlobSet(corners=corners, edges=edges, faces=faces)


def split_blocks(system: SaddleSystem, decomposition: Decomposition) -> BlockSplit:
    """Split free dofs into interior (one owner) and interface (shared) sets.

    The split is stored on the system as well as returned.
    """
    nodes = system.mesh.dof_nodes()[system.free_dofs]
    mult = decomposition.node_multiplicity[nodes]
    interior = np.flatnonzero(mult == 1)
    interface = np.flatnonzero(mult >= 2)
    owner = decomposition.node_owner[nodes[interior]]
    system.interior = interior
    system.interface = interface
    decomp_logger.debug(f"Block split: {interior.size} interior, {interface.size} interface dofs")
    return BlockSplit(interior=interior, interface=interface, interior_subdomain=owner)
