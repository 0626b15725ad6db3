"""Legacy ASCII VTK export of velocity and pressure fields."""

from __future__ import annotations

import io
from pathlib import Path
from typing import Optional, Union

import numpy as np

from ..dd.decomp import Decomposition
from ..errors import DimensionError
from ..fem.mesh import Mesh
from ..logging import bench_logger
from ..utils.io import atomic_write

VTK_HEXAHEDRON = 12


def interpolate_pressure(mesh: Mesh, pressure: np.ndarray) -> np.ndarray:
    """Trilinear pressure at every velocity node.

    On the half-step lattice each node's value is the mean over the element
    vertices bracketing it, which is exact for a trilinear field at edge, face
    and cell midpoints.
    """
    lattice = mesh.lattice
    lo = lattice // 2
    hi = (lattice + 1) // 2
    side = mesh.n + 1
    total = np.zeros(mesh.n_nodes)
    for bits in range(8):
        pick = np.array([(bits >> d) & 1 for d in range(3)], dtype=bool)
        v = np.where(pick[None, :], hi, lo)
        total += pressure[v[:, 0] + side * (v[:, 1] + side * v[:, 2])]
    return total / 8.0


def format_vtk(
    mesh: Mesh,
    velocity: np.ndarray,
    pressure: np.ndarray,
    decomposition: Optional[Decomposition] = None,
    title: str = "stokesbddc solution",
) -> str:
    """Render a legacy VTK 3.0 unstructured grid.

    Points are all velocity nodes; cells are the hexahedra spanned by the
    element vertices. Point data: velocity (vectors), pressure and
    velocity_magnitude (scalars). Cell data: subdomain, when a decomposition
    is given.
    """
    if velocity.shape != (mesh.n_nodes, 3):
        raise DimensionError("export_vtk velocity", (mesh.n_nodes, 3), velocity.shape)
    if pressure.shape != (mesh.n_pressure_nodes,):
        raise DimensionError("export_vtk pressure", mesh.n_pressure_nodes, pressure.shape)

    out = io.StringIO()
    out.write("# vtk DataFile Version 3.0\n")
    out.write(f"{title}\nASCII\nDATASET UNSTRUCTURED_GRID\n")
    out.write(f"POINTS {mesh.n_nodes} double\n")
    np.savetxt(out, mesh.coords, fmt="%.10g")

    cells = mesh.elements[:, :8]
    out.write(f"CELLS {mesh.n_elements} {mesh.n_elements * 9}\n")
    np.savetxt(out, np.hstack([np.full((mesh.n_elements, 1), 8), cells]), fmt="%d")
    out.write(f"CELL_TYPES {mesh.n_elements}\n")
    np.savetxt(out, np.full(mesh.n_elements, VTK_HEXAHEDRON), fmt="%d")

    out.write(f"POINT_DATA {mesh.n_nodes}\n")
    out.write("VECTORS velocity double\n")
    np.savetxt(out, velocity, fmt="%.12g")
    out.write("SCALARS pressure double 1\nLOOKUP_TABLE default\n")
    np.savetxt(out, interpolate_pressure(mesh, pressure), fmt="%.12g")
    out.write("SCALARS velocity_magnitude double 1\nLOOKUP_TABLE default\n")
    np.savetxt(out, np.linalg.norm(velocity, axis=1), fmt="%.12g")

    if decomposition is not None:
        out.write(f"CELL_DATA {mesh.n_elements}\n")
        out.write("SCALARS subdomain int 1\nLOOKUP_TABLE default\n")
        np.savetxt(out, decomposition.element_subdomain, fmt="%d")
    return out.getvalue()


def export_vtk(
    mesh: Mesh,
    solution: np.ndarray,
    path: Union[str, Path],
    decomposition: Optional[Decomposition] = None,
) -> None:
    """Write a global solution vector (velocity dofs then pressure) as VTK.

    Raises:
        DimensionError: If the vector does not match the mesh
        IOError: If the file cannot be written
    """
    if solution.shape != (mesh.n_dofs,):
        raise DimensionError("export_vtk", mesh.n_dofs, solution.shape)
    nv = mesh.n_velocity_dofs
    text = format_vtk(mesh, solution[:nv].reshape(-1, 3), solution[nv:], decomposition)
    atomic_write(path, text)
    bench_logger.info(f"Wrote VTK file {path} ({mesh.n_nodes} points, {mesh.n_elements} cells)")
