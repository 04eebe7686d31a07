"""
Plot-ready output files.

Series go to wide CSV tables (one header row, fixed column order by robot
index), summaries to JSON documents and events to JSON lines. Numbers are
written with 12 significant digits so reruns with the same seed produce
byte-identical files.
"""

from __future__ import annotations

import json
from collections.abc import Iterable
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from cyclic_formation.core.report import CertificationReport
from cyclic_formation.simulation.engine import Event, TrajectoryLog
from cyclic_formation.simulation.metrics import RunMetrics
from cyclic_formation.simulation.montecarlo import MonteCarloReport

FLOAT_FORMAT = "%.12g"

TRAJECTORY_FILE = "trajectory.csv"
SERIES_FILE = "series.csv"
METRICS_FILE = "metrics.json"
EVENTS_FILE = "events.jsonl"
CERTIFICATION_FILE = "certification.json"
MC_SUMMARY_FILE = "montecarlo.json"
MC_RUNS_FILE = "runs.csv"


def _to_json(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _to_json(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_to_json(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, float) and not np.isfinite(value):
        return None
    return value


def _write_json(data: Any, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(_to_json(data), indent=2, sort_keys=True, allow_nan=False)
    path.write_text(text + "\n", encoding="utf-8")
    return path


def _write_csv(frame: pd.DataFrame, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def trajectory_frame(log: TrajectoryLog, velocities: bool = True) -> pd.DataFrame:
    """
    Wide table: ``t`` then ``r{i}_x, r{i}_y, r{i}_z`` (and ``r{i}_vx``...) per robot.
    """
    columns: dict[str, Any] = {"t": log.series("times")}
    pos = np.asarray(log.positions)
    vel = np.asarray(log.velocities)
    for i in range(log.n):
        for k, axis in enumerate("xyz"):
            columns[f"r{i}_{axis}"] = pos[:, i, k]
        if velocities:
            for k, axis in enumerate("xyz"):
                columns[f"r{i}_v{axis}"] = vel[:, i, k]
    return pd.DataFrame(columns)


def series_frame(log: TrajectoryLog) -> pd.DataFrame:
    """Scalar series on the log grid, plus per-robot side errors when tracked."""
    columns: dict[str, Any] = {
        "t": log.series("times"),
        "formation_error": log.series("formation_error"),
        "p_bar": log.series("p_bar"),
        "min_distance": log.series("min_distance"),
        "center_error": log.series("center_error"),
        "control_norm": log.series("control_norm"),
    }
    if log.delta_z:
        columns["delta_z"] = log.series("delta_z")
        columns["disturbance_norm"] = log.series("disturbance_norm")
    sides = np.asarray(log.side_errors)
    if sides.ndim == 2 and np.any(sides):
        for i in range(sides.shape[1]):
            columns[f"p{i}"] = sides[:, i]
    return pd.DataFrame(columns)


def write_trajectory_csv(log: TrajectoryLog, path: str | Path) -> Path:
    """
    Write robot positions and velocities.

    Example:
        >>> write_trajectory_csv(log, "out/trajectory.csv")
        PosixPath('out/trajectory.csv')
    """
    return _write_csv(trajectory_frame(log), path)


def write_series_csv(log: TrajectoryLog, path: str | Path) -> Path:
    return _write_csv(series_frame(log), path)


def write_metrics_json(metrics: RunMetrics, path: str | Path) -> Path:
    return _write_json(metrics.to_dict(), path)


def write_certification_json(report: CertificationReport, path: str | Path) -> Path:
    return _write_json(report.to_dict(), path)


def write_events_jsonl(events: Iterable[Event], path: str | Path) -> Path:
    """One JSON object per line, in occurrence order."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [
        json.dumps(_to_json(e.to_dict()), sort_keys=True, allow_nan=False)
        for e in events
    ]
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    return path


def write_run(
    log: TrajectoryLog, metrics: RunMetrics, directory: str | Path
) -> dict[str, Path]:
    """
    Write every output of a simulation into ``directory``.

    Returns:
        Mapping of output kind to the written path
    """
    directory = Path(directory)
    return {
        "trajectory": write_trajectory_csv(log, directory / TRAJECTORY_FILE),
        "series": write_series_csv(log, directory / SERIES_FILE),
        "metrics": write_metrics_json(metrics, directory / METRICS_FILE),
        "events": write_events_jsonl(log.events, directory / EVENTS_FILE),
    }


def write_montecarlo(
    report: MonteCarloReport, directory: str | Path
) -> dict[str, Path]:
    """Write the campaign summary and the per-run table."""
    directory = Path(directory)
    return {
        "summary": _write_json(report.to_dict(), directory / MC_SUMMARY_FILE),
        "runs": _write_csv(report.to_frame(), directory / MC_RUNS_FILE),
    }
