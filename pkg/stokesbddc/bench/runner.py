"""Benchmark runs: assemble, decompose, precondition, iterate, recover, verify."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Union

import numpy as np
from tqdm import tqdm

from ..config import RunConfig
from ..dd.bddc import BddcPreconditioner
from ..dd.decomp import partition_regular
from ..dd.substructure import (
    SchurOperator,
    condensed_rhs,
    factor_interiors,
    recover_interior,
    solve_monolithic,
)
from ..errors import StokesBDDCError
from ..fem.stokes import assemble_system, define_problem
from ..krylov import solve as krylov_solve
from ..linalg.ilut import ilut_factor
from ..logging import bench_logger
from ..types import LinearMap, RunReport
from ..utils.hash import array_digest
from ..utils.io import atomic_write
from ..utils.time import PhaseTimings
from .vtk import export_vtk

CSV_COLUMNS = [
    "problem",
    "n",
    "m",
    "unknowns",
    "constraints",
    "solver",
    "precond",
    "iters",
    "converged",
    "final_rel_res",
]

VERIFY_FACTOR = 10.0


def run(config: RunConfig) -> RunReport:
    """Execute one configuration end to end.

    BDDC runs iterate on the interface Schur system and recover the interior
    afterwards; ILUT and unpreconditioned runs iterate on the whole reduced
    saddle-point system. In both cases the recovered solution is checked
    against the reduced system.

    Raises:
        StokesBDDCError: On any setup or solver failure
    """
    phases = PhaseTimings()
    direct_error: Optional[float] = None

    with phases.phase("total"):
        with phases.phase("mesh"):
            mesh, problem = define_problem(config.problem, config.n)

        with phases.phase("assembly"):
            system = assemble_system(mesh, problem)

        decomposition = None
        krylov = config.krylov()
        interface_size = virtual_size = n_constraints = n_corners = 0
        ilut_shift = 0.0
        ilut_nnz = 0

        if config.precond == "bddc":
            with phases.phase("decomposition"):
                decomposition = partition_regular(mesh, config.m)
                n_corners = int(decomposition.corners.size)

            workers = config.workers or decomposition.n_subdomains
            with phases.phase("interior_factorization"):
                factors = factor_interiors(system, decomposition, workers=workers)

            with phases.phase("preconditioner_setup"):
                preconditioner = BddcPreconditioner.build(
                    system, decomposition, config.constraints, average_pressure=config.average_pressure
                )
                operator = SchurOperator(system, factors)
                g = condensed_rhs(system, factors)
            interface_size = operator.size
            virtual_size = preconditioner.vs.n_virtual
            n_constraints = preconditioner.vs.n_constraints

            with phases.phase("iterations"):
                result = krylov_solve(operator, preconditioner, g, krylov)

            with phases.phase("recovery"):
                solution = recover_interior(factors, system, result.solution)
        else:
            apply_M: Optional[LinearMap] = None
            with phases.phase("preconditioner_setup"):
                if config.precond == "ilut":
                    ilut_config = config.ilut()
                    precon = ilut_factor(
                        system.matrix,
                        ilut_config.tau,
                        ilut_config.shift_factor,
                        shift_rows=np.flatnonzero(system.pressure_mask),
                    )
                    apply_M = precon.apply
                    ilut_shift = precon.shift
                    ilut_nnz = precon.nnz

            with phases.phase("iterations"):
                result = krylov_solve(system.matrix.matvec, apply_M, system.rhs, krylov)
            solution = result.solution

        if config.check_direct:
            with phases.phase("direct_check"):
                reference = solve_monolithic(system)
            scale = max(float(np.max(np.abs(reference))), 1e-300)
            direct_error = float(np.max(np.abs(solution - reference)) / scale)

    timings = dict(phases.ms)
    timings["per_iteration"] = timings["iterations"] / max(result.iterations, 1.0)

    rhs_norm = float(np.linalg.norm(system.rhs))
    residual = system.residual(solution)
    full_rel_res = float(np.linalg.norm(residual) / rhs_norm) if rhs_norm else 0.0
    pressure_rows = system.pressure_mask
    mass_balance = (
        float(np.max(np.abs(residual[pressure_rows])) / rhs_norm) if rhs_norm and pressure_rows.any() else 0.0
    )
    verified = full_rel_res < VERIFY_FACTOR * krylov.tol
    if result.converged and not verified:
        bench_logger.warning(
            f"Recovered solution misses the reduced system: rel_res={full_rel_res:.3e} "
            f">= {VERIFY_FACTOR:g} * tol"
        )

    report = RunReport(
        config=config.model_dump(mode="json"),
        unknowns=mesh.n_dofs,
        free_unknowns=system.n_free,
        iterations=float(result.iterations),
        converged=result.converged,
        final_rel_res=result.relative_residual,
        full_rel_res=full_rel_res,
        verified=verified,
        mass_balance=mass_balance,
        interface_size=interface_size,
        virtual_size=virtual_size,
        n_constraints=n_constraints,
        n_corners=n_corners,
        ilut_shift=ilut_shift,
        ilut_nnz=ilut_nnz,
        direct_error=direct_error,
        residual_history=list(result.residual_history),
        timings=timings,
        solution_digest=array_digest(solution),
    )

    bench_logger.info(
        f"problem={config.problem} n={config.n} m={config.m} {config.solver.value}/{config.precond}: "
        f"{result.iterations:g} iterations, rel_res={result.relative_residual:.3e}, "
        f"total {timings['total']:.0f}ms"
    )

    if config.vtk_path:
        export_vtk(mesh, system.expand(solution), config.vtk_path, decomposition)
    if config.json_path:
        write_report(report, config.json_path)
    return report


def write_report(report: RunReport, path: Union[str, Path]) -> None:
    """Write a run report as JSON."""
    atomic_write(path, json.dumps(report.to_dict(), indent=2, default=_json_default))


def _json_default(value: object) -> object:
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError(f"not JSON serializable: {type(value).__name__}")


def format_iterations(iterations: float) -> str:
    return f"{iterations:g}"


def failed_report(config: RunConfig, error: StokesBDDCError) -> RunReport:
    """Report of a run that raised; a Krylov breakdown keeps its partial counts."""
    partial = getattr(error, "result", None)
    return RunReport(
        config=config.model_dump(mode="json"),
        unknowns=0,
        free_unknowns=0,
        iterations=float(partial.iterations) if partial is not None else 0.0,
        converged=False,
        final_rel_res=float(partial.relative_residual) if partial is not None else float("nan"),
        residual_history=list(partial.residual_history) if partial is not None else [],
        error=str(error),
    )


def report_row(config: RunConfig, report: RunReport) -> Dict[str, str]:
    """CSV row of a run; a failed run (error set) is marked unconverged with empty counts."""
    ok = report.error is None
    return {
        "problem": str(config.problem),
        "n": str(config.n),
        "m": str(config.m),
        "unknowns": str(report.unknowns) if report.unknowns else "",
        "constraints": config.constraints.label if config.precond == "bddc" else "",
        "solver": config.solver.value,
        "precond": config.precond,
        "iters": format_iterations(report.iterations) if ok else "",
        "converged": str(ok and report.converged).lower(),
        "final_rel_res": repr(report.final_rel_res) if ok else "",
    }


def sweep(
    configs: Iterable[RunConfig],
    out: Optional[Union[str, Path]] = None,
    progress: bool = False,
) -> str:
    """Run every configuration and tabulate the results as CSV.

    A failing run is logged and recorded as unconverged; the sweep goes on.

    Returns:
        The CSV text (also written to `out` when given)
    """
    configs = list(configs)
    rows: List[Dict[str, str]] = []
    for config in tqdm(configs, desc="Sweep", disable=not progress):
        try:
            report = run(config)
        except StokesBDDCError as e:
            bench_logger.error(f"Run failed (problem={config.problem}, n={config.n}, m={config.m}): {e}")
            report = failed_report(config, e)
        rows.append(report_row(config, report))

    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    text = buffer.getvalue()
    if out is not None:
        atomic_write(out, text)
        bench_logger.info(f"Wrote {len(rows)} rows to {out}")
    return text

