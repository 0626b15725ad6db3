"""Tests for structured meshes."""

import numpy as np
import pytest

from stokesbddc.errors import ValidationError
from stokesbddc.fem.mesh import ElementFamily, NodeRole, build_structured_mesh, dof_count, on_boundary, on_plane


@pytest.mark.parametrize(
    "family,n,expected",
    [
        (ElementFamily.Q2Q1, 4, 2312),
        (ElementFamily.Q2Q1, 8, 15468),
        (ElementFamily.Q2S_Q1, 8, 8748),
        (ElementFamily.Q2S_Q1, 12, 27040),
    ],
)
def test_dof_counts(family, n, expected):
    """Unknown counts of the benchmark meshes."""
    counts = dof_count(build_structured_mesh(n, family))
    assert counts.total == expected
    assert counts.pressure == (n + 1) ** 3


def test_serendipity_node_count():
    n = 4
    mesh = build_structured_mesh(n, "q2s_q1")
    assert mesh.n_nodes == (n + 1) ** 3 + 3 * n * (n + 1) ** 2
    assert mesh.elements.shape == (n**3, 20)


def test_single_element_roles():
    """A single Taylor-Hood element has 8 vertices, 12 edges, 6 faces, 1 centre."""
    mesh = build_structured_mesh(1, ElementFamily.Q2Q1)
    counts = np.bincount(mesh.roles, minlength=4)

    assert counts[NodeRole.VERTEX] == 8
    assert counts[NodeRole.EDGE] == 12
    assert counts[NodeRole.FACE] == 6
    assert counts[NodeRole.CELL] == 1
    np.testing.assert_array_equal(np.sort(mesh.elements[0]), np.arange(27))


def test_local_node_order():
    """Vertices follow the VTK hexahedron, edge 0 joins vertices 0 and 1."""
    n = 2
    mesh = build_structured_mesh(n, ElementFamily.Q2Q1)
    h = mesh.h
    xyz = mesh.coords[mesh.elements[0]]

    np.testing.assert_allclose(xyz[0], [0.0, 0.0, 0.0])
    np.testing.assert_allclose(xyz[1], [h, 0.0, 0.0])
    np.testing.assert_allclose(xyz[2], [h, h, 0.0])
    np.testing.assert_allclose(xyz[6], [h, h, h])
    np.testing.assert_allclose(xyz[8], [h / 2, 0.0, 0.0])
    np.testing.assert_allclose(xyz[26], [h / 2, h / 2, h / 2])


def test_elements_are_cubes_of_edge_h():
    mesh = build_structured_mesh(3, ElementFamily.Q2S_Q1)
    vertices = mesh.coords[mesh.elements[:, :8]]
    extent = vertices.max(axis=1) - vertices.min(axis=1)
    np.testing.assert_allclose(extent, mesh.h)


def test_face_nodes_shared_by_at_most_two_elements():
    """Interior faces belong to exactly two elements, boundary faces to one."""
    n = 3
    mesh = build_structured_mesh(n, ElementFamily.Q2Q1)
    counts = np.bincount(mesh.elements[:, 20:26].ravel(), minlength=mesh.n_nodes)
    face_nodes = np.flatnonzero(mesh.roles == NodeRole.FACE)

    assert set(counts[face_nodes]) == {1, 2}
    assert int(np.sum(counts[face_nodes] == 2)) == 3 * n * n * (n - 1)
    assert int(np.sum(counts[face_nodes] == 1)) == 6 * n * n


def test_pressure_nodes_are_vertices():
    mesh = build_structured_mesh(2, ElementFamily.Q2S_Q1)
    assert np.all(mesh.roles[mesh.pressure_nodes] == NodeRole.VERTEX)
    assert mesh.element_pressure.shape == (8, 8)
    np.testing.assert_array_equal(mesh.pressure_index[mesh.pressure_nodes], np.arange(27))


def test_dof_map_and_element_dofs():
    mesh = build_structured_mesh(2, ElementFamily.Q2Q1)
    dof_map = mesh.dof_map()
    dofs = mesh.element_dofs()

    assert dofs.shape == (8, 3 * 27 + 8)
    np.testing.assert_array_equal(dofs[:, :3], dof_map[mesh.elements[:, 0], :3])
    np.testing.assert_array_equal(dofs[:, 81:], mesh.n_velocity_dofs + mesh.element_pressure)
    assert np.all(mesh.dof_fields()[mesh.n_velocity_dofs :] == 3)
    assert mesh.dof_nodes().size == mesh.n_dofs


def test_boundary_predicates():
    mesh = build_structured_mesh(4, ElementFamily.Q2Q1)
    lid = mesh.boundary_nodes(on_plane(1, 1.0))
    surface = mesh.boundary_nodes(on_boundary)

    assert lid.size == 9 * 9
    assert np.allclose(mesh.coords[lid, 1], 1.0)
    assert surface.size == 9**3 - 7**3


def test_center_vertex():
    mesh = build_structured_mesh(4, ElementFamily.Q2S_Q1)
    np.testing.assert_allclose(mesh.coords[mesh.center_vertex()], [0.5, 0.5, 0.5])
    assert mesh.pressure_index[mesh.center_vertex()] >= 0


def test_invalid_mesh():
    with pytest.raises(ValidationError):
        build_structured_mesh(0, ElementFamily.Q2Q1)
    with pytest.raises(ValueError):
        build_structured_mesh(2, "p2p1")
