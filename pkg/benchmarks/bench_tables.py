#!/usr/bin/env python3
"""Benchmark script reproducing the lid-driven cavity iteration tables."""

import sys
from pathlib import Path
from typing import Dict, List, Optional

import typer

# Add stokesbddc to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from stokesbddc import RunConfig, run
from stokesbddc.bench.runner import sweep
from stokesbddc.errors import StokesBDDCError

CONSTRAINTS = ["c", "ce", "cf", "cef"]

# Reference iteration counts at desk scale and the accepted relative spread.
TARGETS = {
    ("problem 1, pcg", "c"): (18.0, 0.5),
    ("problem 1, pcg", "ce"): (15.0, 0.5),
    ("problem 2, gmres", "c"): (26.0, 0.4),
    ("problem 2, gmres", "cef"): (19.0, 0.4),
    ("problem 2, bicgstab", "c"): (20.0, 0.5),
    ("problem 2, bicgstab", "cef"): (15.5, 0.5),
}


def leaky_cavity_configs(n: int = 8, m: int = 2) -> List[RunConfig]:
    """PCG + BDDC on problem 1 for every constraint set."""
    return [RunConfig(problem=1, n=n, m=m, constraints=c, solver="pcg") for c in CONSTRAINTS]


def rotated_lid_configs(n: int = 4, m: int = 2) -> List[RunConfig]:
    """GMRES and BiCGStab + BDDC on problem 2, plus the unpreconditioned baseline."""
    configs = [
        RunConfig(problem=2, n=n, m=m, constraints=c, solver=s)
        for s in ("gmres", "bicgstab")
        for c in CONSTRAINTS
    ]
    configs += [RunConfig(problem=2, n=n, m=m, solver=s, precond="none") for s in ("gmres", "bicgstab")]
    return configs


def ilut_configs(n: int = 4) -> List[RunConfig]:
    """GMRES and BiCGStab + ILUT on the whole problem 2 system."""
    return [
        RunConfig(problem=2, n=n, solver=s, precond="ilut", ilut_tau=tau)
        for tau in (1e-3, 1e-4, 1e-5)
        for s in ("gmres", "bicgstab")
    ]


def benchmark_table(name: str, configs: List[RunConfig]) -> Dict[str, float]:
    """Run one table and print its rows.

    Returns:
        Iteration count per constraint label (BDDC rows only)
    """
    print(f"\n{name}")
    print("-" * 72)
    print(f"  {'solver':<9} {'precond':<7} {'constraints':<11} {'iters':>7} {'rel_res':>10} {'time':>9}")
    counts: Dict[str, float] = {}
    for config in configs:
        try:
            report = run(config)
        except StokesBDDCError as e:
            print(f"  {config.solver.value:<9} {config.precond:<7} {'':<11} failed: {e}")
            continue
        label = config.constraints.value if config.precond == "bddc" else ""
        print(
            f"  {config.solver.value:<9} {config.precond:<7} {label:<11} "
            f"{report.iterations:>7g} {report.final_rel_res:>10.2e} "
            f"{report.timings['total'] / 1000.0:>8.2f}s"
        )
        if config.precond == "bddc":
            counts[f"{config.solver.value}:{label}"] = report.iterations
    return counts


def check_targets(problem: str, solver: str, counts: Dict[str, float]) -> None:
    for (key, constraints), (target, spread) in TARGETS.items():
        if key != f"{problem}, {solver}":
            continue
        actual = counts.get(f"{solver}:{constraints}")
        if actual is None:
            continue
        low, high = target * (1 - spread), target * (1 + spread)
        mark = "✓" if low <= actual <= high else "✗"
        print(f"  {mark} {key} {constraints}: {actual:g} (reference {target:g}, band [{low:g}, {high:g}])")


app = typer.Typer(add_completion=False, help=__doc__)


@app.command()
def main(
    quick: bool = typer.Option(False, "--quick", help="Skip problem 1 (8,748 unknowns)"),
    csv: Optional[Path] = typer.Option(None, "--csv", help="Also write every row as CSV"),
) -> None:
    """Run the benchmark."""
    print("stokesbddc iteration tables")
    print("=" * 72)

    tables = [("Problem 2, BDDC (2,312 unknowns)", rotated_lid_configs()), ("Problem 2, ILUT", ilut_configs())]
    if not quick:
        tables.insert(0, ("Problem 1, BDDC + PCG (8,748 unknowns)", leaky_cavity_configs()))

    for name, configs in tables:
        counts = benchmark_table(name, configs)
        problem = name.split(",")[0].lower()
        for solver in ("pcg", "gmres", "bicgstab"):
            check_targets(problem, solver, counts)

    if csv is not None:
        configs = [c for _, table in tables for c in table]
        sweep(configs, out=csv, progress=True)
        print(f"\nWrote {csv}")

    print("\nBenchmark completed!")


if __name__ == "__main__":
    app()
