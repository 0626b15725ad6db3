"""Tests for config module."""

import json

import pytest
from pydantic import ValidationError as PydanticValidationError

from stokesbddc.config import (
    KrylovMethod,
    RunConfig,
    get_default_config,
    load_config,
    load_config_from_file,
    load_sweep_config,
    save_config,
)
from stokesbddc.dd.bddc import ConstraintSet
from stokesbddc.errors import ConfigurationError


def test_default_config():
    config = get_default_config()

    assert config.problem == 2
    assert config.solver == KrylovMethod.GMRES
    assert config.precond == "bddc"
    assert config.constraints is ConstraintSet.C
    assert config.average_pressure is False
    assert config.tolerance == 1e-8


def test_tolerance_defaults_per_problem():
    assert RunConfig(problem=1, n=4, m=2).tolerance == 1e-6
    assert RunConfig(problem=2, n=4, m=2).tolerance == 1e-8
    assert RunConfig(problem=1, n=4, m=2, tol=1e-9).tolerance == 1e-9


def test_constraints_accept_plus_notation():
    config = RunConfig(constraints="c+e+f")
    assert config.constraints is ConstraintSet.CEF
    assert config.model_dump(mode="json")["constraints"] == "cef"


def test_invalid_config():
    with pytest.raises(PydanticValidationError):
        RunConfig(n=5, m=1)
    with pytest.raises(PydanticValidationError):
        RunConfig(n=8, m=3)
    with pytest.raises(PydanticValidationError):
        RunConfig(constraints="everything")
    with pytest.raises(PydanticValidationError):
        RunConfig(problem=3)


def test_load_config():
    config = load_config({"problem": 1, "n": 8, "m": 2, "solver": "pcg"})
    assert config.solver is KrylovMethod.PCG
    assert config.krylov().tol == 1e-6

    with pytest.raises(ConfigurationError) as exc:
        load_config({"n": 6, "m": 4})
    assert "m=4" in str(exc.value)


def test_save_and_load_config(tmp_path):
    path = tmp_path / "run.json"
    config = RunConfig(problem=2, n=8, m=4, constraints="c+f", solver="bicgstab")
    save_config(config, path)

    assert load_config_from_file(path) == config


def test_load_sweep_config(tmp_path):
    runs = [{"n": 4, "m": 2}, {"n": 4, "m": 2, "precond": "ilut"}]
    assert len(load_sweep_config(runs).runs) == 2
    assert len(load_sweep_config({"runs": runs}).runs) == 2

    path = tmp_path / "sweep.json"
    path.write_text(json.dumps({"runs": runs}), encoding="utf-8")
    sweep = load_sweep_config(path)
    assert sweep.runs[1].precond == "ilut"

    with pytest.raises(ConfigurationError):
        load_sweep_config(tmp_path / "missing.json")
    with pytest.raises(ConfigurationError):
        load_sweep_config([{"n": 3}])
