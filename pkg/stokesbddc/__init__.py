"""stokesbddc: BDDC domain decomposition and Krylov solvers for 3D Stokes flow."""

from __future__ import annotations

__version__ = "0.1.0"
__author__ = "stokesbddc contributors"

from .api import (
    BddcPreconditioner,
    ConstraintSet,
    KrylovResult,
    RunConfig,
    RunReport,
    assemble_system,
    build_structured_mesh,
    partition_regular,
    run,
    sweep,
)


def cli() -> None:
    """Run the stokesbddc CLI."""
    from .cli import app

    app()


__all__ = [
    "BddcPreconditioner",
    "ConstraintSet",
    "KrylovResult",
    "RunConfig",
    "RunReport",
    "assemble_system",
    "build_structured_mesh",
    "partition_regular",
    "run",
    "sweep",
    "cli",
]
