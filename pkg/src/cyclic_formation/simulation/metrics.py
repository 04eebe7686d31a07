"""Run summaries: convergence flags, times and bound checks."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Any

import numpy as np
from numpy.typing import NDArray

from cyclic_formation.core.cyclic import contraction_rate
from cyclic_formation.core.report import CertificationReport
from cyclic_formation.extensions.robustness import RobustnessModel, robustness_bound
from cyclic_formation.simulation.engine import TrajectoryLog
from cyclic_formation.simulation.model import FormationModel

BURN_IN_FRACTION = 0.1
SLOPE_FLOOR = 1e-11
BOUND_RTOL = 1e-3


@dataclass
class RobustnessMetrics:
    rate: float
    d_bar: float
    d_max: float
    steady_state_bound: float
    max_delta_z: float
    final_delta_z: float
    bound_violated: bool
    d_bar_declared: float | None = None
    d_bar_exceeded: bool = False
    steady_state_declared: float | None = None


@dataclass
class RunMetrics:
    """
    Summary of one run. Every number is derived from a log series or a
    certification check.
    """

    scenario: str
    seed: int
    status: str
    n: int
    steps: int
    t_final: float
    formation_error_initial: float
    formation_error_final: float
    formation_ratio: float
    max_side_error: float | None
    center_error_final: float | None
    min_distance: float
    peak_control_norm: float
    converged_shape: bool
    converged_size: bool
    converged_center: bool
    converged: bool
    convergence_time: float | None
    measured_rate: float | None
    collisions: int
    saturation_events: int
    speed_limit_events: int = 0
    robustness: RobustnessMetrics | None = None
    certification: dict[str, Any] | None = None

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def _ratio(series: NDArray[np.float64]) -> NDArray[np.float64]:
    first = series[0]
    if first <= 0.0:
        return np.where(series <= SLOPE_FLOOR, 0.0, np.inf)
    return series / first


def measured_rate(times: NDArray, errors: NDArray) -> float | None:
    """
    Decay rate of the formation error from a log-linear fit.

    Samples in the first 10% of the run and samples at the numerical floor
    are excluded. Returns None when fewer than three samples remain.
    """
    if len(times) < 3 or errors[0] <= 0.0:
        return None
    keep = (times >= BURN_IN_FRACTION * times[-1]) & (errors > SLOPE_FLOOR * errors[0])
    if keep.sum() < 3:
        return None
    slope = np.polyfit(times[keep], np.log(errors[keep]), 1)[0]
    return float(-slope)


def compute_metrics(
    log: TrajectoryLog,
    model: FormationModel,
    report: CertificationReport | None = None,
) -> RunMetrics:
    """Summarize a run against the scenario's convergence tolerances."""
    tol = model.scenario.convergence
    times = log.series("times")
    errors = log.series("formation_error")
    ratio = _ratio(errors)

    ok_shape = ratio <= tol.formation_rel_tol
    if model.size is not None:
        side = np.array([np.abs(p).max() if p.size else 0.0 for p in log.side_errors])
        ok_size = side <= tol.side_rel_tol
    else:
        side = None
        ok_size = np.ones_like(ok_shape)
    if model.center is not None:
        center = log.series("center_error")
        ok_center = center <= tol.center_tol_m
    else:
        center = None
        ok_center = np.ones_like(ok_shape)
    ok = ok_shape & ok_size & ok_center

    convergence_time = None
    if log.status == "completed" and ok[-1]:
        failing = np.flatnonzero(~ok)
        convergence_time = float(times[failing[-1] + 1] if failing.size else times[0])

    robustness = None
    if model.disturbance is not None and log.delta_z:
        rate = contraction_rate(model.cm, model.laplacian())
        declared = model.disturbance.d_bar
        d_bar = max(declared or 0.0, log.d_max)
        exceeded = declared is not None and log.d_max > declared * (1.0 + BOUND_RTOL)
        delta = log.series("delta_z")
        if rate > 0.0:
            rm = RobustnessModel(-rate, d_bar)
            bound = np.asarray(robustness_bound(rm, times))
            violated = bool(np.any(delta > bound * (1.0 + BOUND_RTOL) + 1e-12))
            ss = d_bar / rate
            ss_declared = None if declared is None else declared / rate
        else:
            violated, ss = True, float("inf")
            ss_declared = None if declared is None else float("inf")
        robustness = RobustnessMetrics(
            rate=rate,
            d_bar=d_bar,
            d_max=log.d_max,
            steady_state_bound=ss,
            max_delta_z=float(delta.max()),
            final_delta_z=float(delta[-1]),
            bound_violated=violated,
            d_bar_declared=declared,
            d_bar_exceeded=exceeded,
            steady_state_declared=ss_declared,
        )

    status_ok = log.status == "completed"
    return RunMetrics(
        scenario=log.scenario,
        seed=log.seed,
        status=log.status,
        n=log.n,
        steps=log.steps,
        t_final=float(times[-1]),
        formation_error_initial=float(errors[0]),
        formation_error_final=float(errors[-1]),
        formation_ratio=float(ratio[-1]),
        max_side_error=None if side is None else float(side[-1]),
        center_error_final=None if center is None else float(center[-1]),
        min_distance=float(log.series("min_distance").min()),
        peak_control_norm=float(log.series("control_norm").max()),
        converged_shape=status_ok and bool(ok_shape[-1]),
        converged_size=status_ok and bool(ok_size[-1]),
        converged_center=status_ok and bool(ok_center[-1]),
        converged=status_ok and bool(ok[-1]),
        convergence_time=convergence_time,
        measured_rate=measured_rate(times, errors),
        collisions=sum(e.kind == "collision" for e in log.events),
        saturation_events=sum(e.kind == "saturation" for e in log.events),
        speed_limit_events=sum(e.kind == "speed_limit" for e in log.events),
        robustness=robustness,
        certification=None if report is None else report.to_dict(),
    )
