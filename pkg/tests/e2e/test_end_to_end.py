"""End-to-end tests for stokesbddc."""

import csv
import io
import json
import tempfile
from pathlib import Path

import pytest

from stokesbddc import RunConfig, run, sweep
from stokesbddc.config import load_sweep_config


@pytest.fixture
def temp_dir():
    """Create a temporary directory for tests."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir)


def _iterations(**kwargs) -> float:
    report = run(RunConfig(**kwargs))
    assert report.converged, kwargs
    assert report.verified, kwargs
    return report.iterations


def test_bddc_gmres_problem_2(temp_dir):
    """Problem 2 on 2,312 unknowns with corner constraints, outputs written."""
    vtk_path = temp_dir / "cavity.vtk"
    json_path = temp_dir / "report.json"
    report = run(
        RunConfig(
            problem=2, n=4, m=2, constraints="c", solver="gmres", check_direct=True,
            vtk_path=str(vtk_path), json_path=str(json_path),
        )
    )

    assert report.unknowns == 2312
    assert report.converged
    assert report.verified
    assert report.final_rel_res < 1e-8
    assert report.direct_error is not None and report.direct_error < 1e-4
    assert report.mass_balance < 1e-7
    assert report.n_corners == 19
    assert set(report.timings) >= {"assembly", "interior_factorization", "iterations", "total"}

    assert vtk_path.read_text(encoding="utf-8").startswith("# vtk DataFile Version 3.0")
    data = json.loads(json_path.read_text(encoding="utf-8"))
    assert data["iterations"] == report.iterations
    assert data["config"]["constraints"] == "c"
    assert data["residual_history"][0] == 1.0


@pytest.mark.parametrize("problem,n", [(1, 4), (2, 2)])
@pytest.mark.parametrize("solver", ["pcg", "gmres", "bicgstab"])
def test_single_subdomain_is_exact(problem, n, solver):
    """With one subdomain the interface is empty and the direct solve is the answer."""
    report = run(RunConfig(problem=problem, n=n, m=1, solver=solver))

    assert report.converged
    assert report.iterations <= 1
    assert report.interface_size == 0
    assert report.full_rel_res < 1e-10


def test_bicgstab_reports_half_steps():
    report = run(RunConfig(problem=2, n=4, m=2, constraints="c+e", solver="bicgstab"))
    assert report.converged
    assert 2 * report.iterations == int(2 * report.iterations)


@pytest.mark.slow
@pytest.mark.integration
def test_problem_2_iteration_bands_and_monotonicity():
    """GMRES and BiCGStab counts for the four constraint sets on eight boxes."""
    gm = {c: _iterations(problem=2, n=4, m=2, constraints=c, solver="gmres") for c in ("c", "ce", "cf", "cef")}
    bi = {c: _iterations(problem=2, n=4, m=2, constraints=c, solver="bicgstab") for c in ("c", "cef")}

    assert 16 <= gm["c"] <= 36
    assert 12 <= gm["cef"] <= 27
    assert 10 <= bi["c"] <= 30
    assert 7.75 <= bi["cef"] <= 23.25
    assert gm["cef"] <= gm["c"]
    assert gm["ce"] <= gm["c"]


@pytest.mark.slow
@pytest.mark.integration
def test_problem_1_pcg():
    """Leaky cavity on 8,748 unknowns with PCG and corner (+edge) constraints."""
    c = run(RunConfig(problem=1, n=8, m=2, constraints="c", solver="pcg"))
    ce = run(RunConfig(problem=1, n=8, m=2, constraints="c+e", solver="pcg"))

    assert c.unknowns == 8748
    assert c.converged and ce.converged
    assert 9 <= c.iterations <= 27
    assert 8 <= ce.iterations <= 23
    assert ce.iterations <= c.iterations


@pytest.mark.slow
def test_unpreconditioned_baseline_is_slower():
    bddc = _iterations(problem=2, n=4, m=2, constraints="c", solver="gmres")
    plain = _iterations(problem=2, n=4, m=2, solver="gmres", precond="none")
    assert plain >= 3 * bddc


@pytest.mark.slow
def test_ilut_drop_tolerance_trend():
    """Smaller drop tolerances never need more GMRES iterations."""
    counts = [
        _iterations(problem=2, n=4, solver="gmres", precond="ilut", ilut_tau=tau)
        for tau in (1e-3, 1e-4, 1e-5)
    ]
    assert counts[0] >= counts[1] >= counts[2]
    assert counts[2] <= 10


@pytest.mark.slow
@pytest.mark.integration
def test_edge_and_face_constraints_keep_iterations_flat():
    small = _iterations(problem=2, n=4, m=2, constraints="cef", solver="gmres")
    large = _iterations(problem=2, n=6, m=3, constraints="cef", solver="gmres")
    assert large <= 1.5 * small


def test_pressure_averages_add_constraint_rows():
    velocity_only = run(RunConfig(problem=2, n=4, m=2, constraints="cef", solver="gmres"))
    with_pressure = run(RunConfig(problem=2, n=4, m=2, constraints="cef", solver="gmres", average_pressure=True))

    assert velocity_only.n_constraints == 90
    assert with_pressure.n_constraints == 120
    assert velocity_only.converged and with_pressure.converged
    assert with_pressure.config["average_pressure"] is True


def test_runs_are_deterministic():
    config = RunConfig(problem=2, n=4, m=2, constraints="c+f", solver="gmres", workers=4)
    first = run(config)
    second = run(config)

    assert first.iterations == second.iterations
    assert first.solution_digest == second.solution_digest


def test_sweep_writes_csv(temp_dir):
    """A failing run is recorded as unconverged and the sweep continues."""
    sweep_config = load_sweep_config(
        [
            {"problem": 2, "n": 2, "m": 1},
            {"problem": 1, "n": 2, "m": 2},
            {"problem": 2, "n": 2, "solver": "bicgstab", "precond": "ilut", "ilut_tau": 1e-5},
        ]
    )
    out = temp_dir / "table.csv"
    text = sweep(sweep_config.runs, out=out)
    rows = list(csv.DictReader(io.StringIO(text)))

    assert out.read_text(encoding="utf-8") == text
    assert [r["converged"] for r in rows] == ["true", "false", "true"]
    assert rows[1]["iters"] == ""
    assert rows[0]["constraints"] == "c"
    assert rows[2]["constraints"] == ""
    assert float(rows[2]["final_rel_res"]) < 1e-8
