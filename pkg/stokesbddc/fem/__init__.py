"""Structured hexahedral meshes and Stokes assembly."""

from .mesh import ElementFamily, Mesh, NodeRole, boundary_nodes, build_structured_mesh, dof_count
from .stokes import (
    SaddleSystem,
    StokesProblem,
    assemble_system,
    define_problem,
    define_problem_1,
    define_problem_2,
)

__all__ = [
    "ElementFamily",
    "Mesh",
    "NodeRole",
    "build_structured_mesh",
    "dof_count",
    "boundary_nodes",
    "StokesProblem",
    "SaddleSystem",
    "assemble_system",
    "define_problem",
    "define_problem_1",
    "define_problem_2",
]
