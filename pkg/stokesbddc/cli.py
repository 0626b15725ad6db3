"""Command-line interface for stokesbddc."""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Optional

import typer
from rich.console import Console
from rich.table import Table

from .bench.runner import CSV_COLUMNS, run, sweep as run_sweep
from .config import KrylovMethod, RunConfig, load_sweep_config
from .dd.bddc import ConstraintSet, build_virtual_system
from .dd.decomp import partition_regular, split_blocks
from .errors import StokesBDDCError
from .fem.stokes import assemble_system, define_problem
from .logging import cli_logger, setup_logger
from .utils.time import format_duration

app = typer.Typer(
    name="stokesbddc",
    help="stokesbddc: BDDC and Krylov solvers for 3D Stokes lid-driven cavities",
    no_args_is_help=True,
)

console = Console()


def setup_logging(verbose: bool = False) -> None:
    """Set up logging for CLI."""
    setup_logger("stokesbddc", level="DEBUG" if verbose else "WARNING")


@app.command()
def solve(
    problem: int = typer.Option(2, "--problem", "-p", help="1 = leaky cavity (Q2S), 2 = rotated lid (Q2Q1)"),
    n: int = typer.Option(4, "--n", help="Elements per axis (even)"),
    m: int = typer.Option(2, "--m", help="Subdomains per axis (divides n)"),
    constraints: str = typer.Option("c", "--constraints", help="Primal constraints: c, ce, cf or cef"),
    average_pressure: bool = typer.Option(
        False, "--average-pressure", help="Also match pressure averages on edges and faces"
    ),
    solver: KrylovMethod = typer.Option(KrylovMethod.GMRES, "--solver", help="Krylov method"),
    precond: str = typer.Option("bddc", "--precond", help="Preconditioner: bddc, ilut or none"),
    tol: Optional[float] = typer.Option(None, "--tol", help="Relative tolerance (default 1e-6 / 1e-8)"),
    ilut_tau: float = typer.Option(1e-4, "--ilut-tau", help="ILUT drop tolerance"),
    max_iters: int = typer.Option(1000, "--max-iters", help="Iteration cap"),
    restart: Optional[int] = typer.Option(None, "--restart", help="GMRES restart length"),
    workers: int = typer.Option(1, "--workers", help="Threads for subdomain factorization (0=auto)"),
    check_direct: bool = typer.Option(False, "--check-direct", help="Compare with a direct solve"),
    vtk: Optional[Path] = typer.Option(None, "--vtk", help="Write the solution as legacy VTK"),
    json_out: Optional[Path] = typer.Option(None, "--json", help="Write the run report as JSON"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Verbose output"),
) -> None:
    """Solve one benchmark configuration."""
    setup_logging(verbose)

    try:
        config = RunConfig(
            problem=problem,
            n=n,
            m=m,
            constraints=constraints,
            average_pressure=average_pressure,
            solver=solver,
            precond=precond,
            tol=tol,
            ilut_tau=ilut_tau,
            max_iters=max_iters,
            restart=restart,
            workers=workers,
            check_direct=check_direct,
            vtk_path=str(vtk) if vtk else None,
            json_path=str(json_out) if json_out else None,
        )
    except ValueError as e:
        console.print(f"[red]Invalid configuration: {e}[/red]")
        raise typer.Exit(1)

    try:
        report = run(config)
    except StokesBDDCError as e:
        console.print(f"[red]Error: {e}[/red]")
        raise typer.Exit(1)
    except Exception as e:
        cli_logger.exception("solve failed")
        console.print(f"[red]Unexpected error: {e}[/red]")
        raise typer.Exit(1)

    table = Table(title=f"Problem {config.problem}, n={config.n}, m={config.m}")
    table.add_column("Quantity", style="cyan")
    table.add_column("Value", justify="right", style="white")
    table.add_row("unknowns", str(report.unknowns))
    table.add_row("free unknowns", str(report.free_unknowns))
    if config.precond == "bddc":
        table.add_row("interface dofs", str(report.interface_size))
        table.add_row("constraints", f"{config.constraints.label} ({report.n_constraints} rows)")
    table.add_row("solver", f"{config.solver.value} / {config.precond}")
    table.add_row("iterations", f"{report.iterations:g}")
    table.add_row("relative residual", f"{report.final_rel_res:.3e}")
    table.add_row("full-system residual", f"{report.full_rel_res:.3e}")
    if report.direct_error is not None:
        table.add_row("distance to direct", f"{report.direct_error:.3e}")
    table.add_row("total time", format_duration(report.timings.get("total", 0.0)))
    console.print(table)

    if report.converged:
        console.print("[green]✓ Converged[/green]")
    else:
        console.print("[yellow]Did not converge[/yellow]")
        raise typer.Exit(2)


@app.command()
def sweep(
    config_file: Path = typer.Option(..., "--config", "-c", help="Sweep configuration (JSON)"),
    out: Path = typer.Option(..., "--out", "-o", help="CSV output file"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Verbose output"),
) -> None:
    """Run a list of configurations and write a CSV table."""
    setup_logging(verbose)

    try:
        sweep_config = load_sweep_config(config_file)
        text = run_sweep(sweep_config.runs, out=out, progress=True)
    except StokesBDDCError as e:
        console.print(f"[red]Error: {e}[/red]")
        raise typer.Exit(1)

    rows = list(csv.DictReader(io.StringIO(text)))
    table = Table(title=f"Sweep results ({len(rows)} runs)")
    columns = [c for c in CSV_COLUMNS if c != "final_rel_res"]
    for column in columns:
        table.add_column(column, justify="right")
    for row in rows:
        table.add_row(*(row[c] for c in columns))
    console.print(table)
    console.print(f"Wrote {out}")


@app.command()
def info(
    problem: int = typer.Option(2, "--problem", "-p", help="1 or 2"),
    n: int = typer.Option(4, "--n", help="Elements per axis (even)"),
    m: int = typer.Option(2, "--m", help="Subdomains per axis"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Verbose output"),
) -> None:
    """Show mesh, interface and virtual-system sizes without solving."""
    setup_logging(verbose)

    try:
        mesh, stokes = define_problem(problem, n)
        system = assemble_system(mesh, stokes)
        decomposition = partition_regular(mesh, m)
        split = split_blocks(system, decomposition)
        globs = decomposition.globs

        table = Table(title=f"Problem {problem}: {mesh.family.value}, n={n}, m={m}")
        table.add_column("Quantity", style="cyan")
        table.add_column("Value", justify="right")
        counts = mesh.dof_count()
        table.add_row("velocity dofs", str(counts.velocity))
        table.add_row("pressure dofs", str(counts.pressure))
        table.add_row("unknowns", str(counts.total))
        table.add_row("free unknowns", str(system.n_free))
        table.add_row("interior / interface", f"{split.interior.size} / {split.interface.size}")
        table.add_row("corners", str(globs.corners.size))
        table.add_row("edge globs", str(len(globs.edges)))
        table.add_row("face globs", str(len(globs.faces)))
        for constraint_set in ConstraintSet:
            vs = build_virtual_system(system, decomposition, constraint_set, factorize=False)
            table.add_row(
                f"virtual dofs + constraints ({constraint_set.label})",
                f"{vs.n_virtual} + {vs.n_constraints}",
            )
        console.print(table)
    except StokesBDDCError as e:
        console.print(f"[red]Error: {e}[/red]")
        raise typer.Exit(1)


if __name__ == "__main__":
    app()
