"""Benchmark harness and field export."""

from .runner import run, sweep, write_report
from .vtk import export_vtk

__all__ = ["run", "sweep", "write_report", "export_vtk"]
