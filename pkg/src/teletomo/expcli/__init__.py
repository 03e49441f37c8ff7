"""Experiment orchestration, file formats and the command-line interface."""

from .formats import ExperimentConfig, RecordFile, read_records, read_state, write_records, write_state
from .runner import compare, convergence, reconstruct, simulate

__all__ = [
    "ExperimentConfig",
    "RecordFile",
    "compare",
    "convergence",
    "read_records",
    "read_state",
    "reconstruct",
    "simulate",
    "write_records",
    "write_state",
]
