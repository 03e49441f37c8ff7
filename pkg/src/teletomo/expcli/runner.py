"""Experiment orchestration behind the CLI commands."""

from __future__ import annotations

import numpy as np

from .. import teleportsim, tomo
from ..errors import InvalidInputError
from ..qstate import DensityMatrix, frobenius_distance, trace_distance
from .formats import ExperimentConfig, RecordFile, complex_pairs


def simulate(shared: DensityMatrix, config: ExperimentConfig, workers: int = 1) -> RecordFile:
    if shared.qubits != config.qubits:
        raise InvalidInputError(f"state has {shared.qubits} qubits but the config declares {config.qubits}")
    if config.mode == "exact":
        if config.all_outcomes:
            records = []
            for arr in teleportsim.all_arrangements(config.qubits, config.input_set):
                records.extend(teleportsim.outcome_table(shared, arr))
        else:
            records = teleportsim.exact_records(shared, config.designated_outcomes, config.input_set)
    else:
        shots = teleportsim.sample_shots(
            shared,
            teleportsim.all_arrangements(config.qubits, config.input_set),
            config.shots_per_probe,
            config.seed,
            workers=workers,
        )
        records = teleportsim.estimate_records(shots, config.designated_outcomes)
    return RecordFile(config, tuple(records))


def reconstruct(rf: RecordFile, method: str = "auto", outcomes=None) -> tomo.ReconstructionReport:
    cfg = rf.config
    outcomes = tuple(outcomes) if outcomes is not None else cfg.designated_outcomes
    data = rf.data_for(outcomes)
    return tomo.reconstruct(data, outcomes, cfg.qubits, method, cfg.input_set)


def report_json(report: tomo.ReconstructionReport) -> dict:
    return {
        "method": report.method.value,
        "residual": report.residual,
        "condition": report.condition,
        "projected": report.projected,
        "raw_trace": float(np.trace(report.raw).real),
        "raw": complex_pairs(report.raw),
    }


def compare(truth: DensityMatrix, estimate: DensityMatrix) -> dict:
    return {
        "trace_distance": trace_distance(truth, estimate),
        "frobenius": frobenius_distance(truth, estimate),
        "max_entry": float(np.max(np.abs(truth.mat - estimate.mat))),
    }


def convergence(
    shared: DensityMatrix,
    shot_grid,
    seeds,
    method: str = "auto",
    outcomes=None,
    workers: int = 1,
) -> list[tuple[int, int, float]]:
    """Sample, reconstruct and score for every (shots, seed) pair."""
    rows = []
    for n_shots in shot_grid:
        for seed in seeds:
            cfg = ExperimentConfig(
                shared.qubits,
                mode="sampled",
                shots_per_probe=int(n_shots),
                seed=int(seed),
                designated_outcomes=tuple(outcomes) if outcomes is not None else None,
            )
            report = reconstruct(simulate(shared, cfg, workers), method)
            rows.append((int(n_shots), int(seed), trace_distance(report.rho_hat, shared)))
    return rows
