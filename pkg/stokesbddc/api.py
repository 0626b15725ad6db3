"""Public API for stokesbddc."""

from .bench.runner import run, sweep
from .bench.vtk import export_vtk
from .config import KrylovConfig, KrylovMethod, RunConfig, SweepConfig, load_sweep_config
from .dd.bddc import BddcPreconditioner, ConstraintSet, build_virtual_system
from .dd.decomp import Decomposition, partition_regular
from .dd.substructure import SchurOperator, condensed_rhs, factor_interiors, recover_interior
from .fem.mesh import ElementFamily, Mesh, build_structured_mesh
from .fem.stokes import SaddleSystem, StokesProblem, assemble_system, define_problem_1, define_problem_2
from .krylov import bicgstab, gmres, pcg
from .types import DofCounts, KrylovResult, RunReport

__all__ = [
    "run",
    "sweep",
    "export_vtk",
    "KrylovConfig",
    "KrylovMethod",
    "RunConfig",
    "SweepConfig",
    "load_sweep_config",
    "BddcPreconditioner",
    "ConstraintSet",
    "build_virtual_system",
    "Decomposition",
    "partition_regular",
    "SchurOperator",
    "condensed_rhs",
    "factor_interiors",
    "recover_interior",
    "ElementFamily",
    "Mesh",
    "build_structured_mesh",
    "SaddleSystem",
    "StokesProblem",
    "assemble_system",
    "define_problem_1",
    "define_problem_2",
    "pcg",
    "gmres",
    "bicgstab",
    "DofCounts",
    "KrylovResult",
    "RunReport",
]
