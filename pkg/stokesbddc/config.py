"""Configuration management for stokesbddc."""

from __future__ import annotations

import json
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, Field, ValidationError as PydanticValidationError, field_validator, model_validator

from .dd.bddc import ConstraintSet
from .errors import ConfigurationError, ValidationError
from .utils.io import atomic_write

DEFAULT_TOLERANCE = {1: 1e-6, 2: 1e-8}


class KrylovMethod(str, Enum):
    PCG = "pcg"
    GMRES = "gmres"
    BICGSTAB = "bicgstab"


class KrylovConfig(BaseModel):
    """Configuration for a Krylov solve."""

    method: KrylovMethod = KrylovMethod.GMRES
    """Krylov method."""

    tol: float = Field(default=1e-8, gt=0.0, lt=1.0)
    """Relative residual tolerance."""

    max_iters: int = Field(default=1000, ge=1)
    """Iteration cap."""

    restart: Optional[int] = Field(default=None, ge=1)
    """GMRES restart length (None = unrestarted)."""


class IlutConfig(BaseModel):
    """Configuration for the ILUT preconditioner."""

    tau: float = Field(default=1e-4, ge=0.0, lt=1.0)
    """Drop tolerance relative to the row 2-norm."""

    shift_factor: float = Field(default=1e-12, ge=0.0)
    """Zero-diagonal rows are shifted by shift_factor * ||A||_inf."""


class RunConfig(BaseModel):
    """One benchmark run."""

    problem: Literal[1, 2] = 2
    """1 = leaky cavity (serendipity), 2 = rotated-lid cavity (Taylor-Hood)."""

    n: int = Field(default=4, ge=2)
    """Elements per axis (even)."""

    m: int = Field(default=2, ge=1)
    """Subdomains per axis; must divide n."""

    constraints: ConstraintSet = ConstraintSet.C
    """BDDC primal constraints besides corners."""

    average_pressure: bool = False
    """Also match pressure averages on edge and face globs."""

    solver: KrylovMethod = KrylovMethod.GMRES
    """Krylov method."""

    precond: Literal["bddc", "ilut", "none"] = "bddc"
    """Preconditioner."""

    tol: Optional[float] = Field(default=None, gt=0.0, lt=1.0)
    """Tolerance; defaults to 1e-6 for problem 1 and 1e-8 for problem 2."""

    ilut_tau: float = Field(default=1e-4, ge=0.0, lt=1.0)
    """ILUT drop tolerance."""

    max_iters: int = Field(default=1000, ge=1)
    """Iteration cap."""

    restart: Optional[int] = Field(default=None, ge=1)
    """GMRES restart length."""

    workers: int = Field(default=1, ge=0, le=64)
    """Threads for subdomain factorizations (0 = one per subdomain)."""

    check_direct: bool = False
    """Also solve directly and report the distance to the direct solution."""

    vtk_path: Optional[str] = None
    """Write the solution as legacy VTK here."""

    json_path: Optional[str] = None
    """Write the run report as JSON here."""

    @field_validator("constraints", mode="before")
    @classmethod
    def validate_constraints(cls, v: Any) -> Any:
        try:
            return ConstraintSet.parse(v)
        except ValidationError as e:
            raise ValueError(str(e)) from None

    @field_validator("n")
    @classmethod
    def validate_n(cls, v: int) -> int:
        if v % 2:
            raise ValueError("n must be even so the centre vertex exists")
        return v

    @model_validator(mode="after")
    def validate_partition(self) -> RunConfig:
        if self.n % self.m:
            raise ValueError(f"m={self.m} must divide n={self.n}")
        return self

    @property
    def tolerance(self) -> float:
        return self.tol if self.tol is not None else DEFAULT_TOLERANCE[self.problem]

    def krylov(self) -> KrylovConfig:
        return KrylovConfig(
            method=self.solver, tol=self.tolerance, max_iters=self.max_iters, restart=self.restart
        )

    def ilut(self) -> IlutConfig:
        return IlutConfig(tau=self.ilut_tau)


class SweepConfig(BaseModel):
    """A list of runs executed one after another."""

    runs: List[RunConfig] = Field(default_factory=list)


def get_default_config() -> RunConfig:
    return RunConfig()


def load_config(config_dict: Dict[str, Any]) -> RunConfig:
    """Build a RunConfig from a dictionary.

    Raises:
        ConfigurationError: If the configuration is invalid
    """
    try:
        return RunConfig(**config_dict)
    except PydanticValidationError as e:
        raise ConfigurationError(_first_error(e), _first_location(e)) from e


def load_sweep_config(source: Union[str, Path, Dict[str, Any], List[Any]]) -> SweepConfig:
    """Load a sweep from a JSON file, a dict with a "runs" list, or a bare list."""
    data: Any = source
    if isinstance(source, (str, Path)):
        try:
            with open(source, "r", encoding="utf-8") as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigurationError(f"cannot read sweep file {source}: {e}", "config") from e
    if isinstance(data, list):
        data = {"runs": data}
    try:
        return SweepConfig(**data)
    except PydanticValidationError as e:
        raise ConfigurationError(_first_error(e), _first_location(e)) from e


def save_config(config: BaseModel, file_path: Union[str, Path]) -> None:
    atomic_write(file_path, json.dumps(config.model_dump(mode="json"), indent=2))


def load_config_from_file(file_path: Union[str, Path]) -> RunConfig:
    try:
        with open(file_path, "r", encoding="utf-8") as f:
            return load_config(json.load(f))
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigurationError(f"cannot read config file {file_path}: {e}", "config") from e


def _first_error(e: PydanticValidationError) -> str:
    errors = e.errors()
    return str(errors[0]["msg"]) if errors else str(e)


def _first_location(e: PydanticValidationError) -> str:
    errors = e.errors()
    return ".".join(str(p) for p in errors[0]["loc"]) if errors else ""
