"""
Monte Carlo campaigns over randomized initial positions.

Each sample gets its own seed drawn from ``SeedSequence(master_seed)``, so a
campaign is reproducible regardless of worker count or completion order.
"""

from __future__ import annotations

import dataclasses
import logging
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import pandas as pd
from numpy.random import SeedSequence
from tqdm import tqdm

from cyclic_formation.exceptions import FormationError
from cyclic_formation.simulation.engine import run
from cyclic_formation.simulation.metrics import RunMetrics, compute_metrics
from cyclic_formation.simulation.model import FormationModel
from cyclic_formation.simulation.scenario import Scenario

logger = logging.getLogger(__name__)


@dataclass
class MonteCarloRun:
    """Outcome of one sample; ``error`` is set when the run could not start."""

    run_id: int
    seed: int
    status: str
    converged: bool = False
    collisions: int = 0
    min_distance: float = float("nan")
    formation_ratio: float = float("nan")
    max_side_error: float | None = None
    center_error_final: float | None = None
    convergence_time: float | None = None
    error: str | None = None

    @classmethod
    def from_metrics(cls, run_id: int, m: RunMetrics) -> MonteCarloRun:
        return cls(
            run_id=run_id,
            seed=m.seed,
            status=m.status,
            converged=m.converged,
            collisions=m.collisions,
            min_distance=m.min_distance,
            formation_ratio=m.formation_ratio,
            max_side_error=m.max_side_error,
            center_error_final=m.center_error_final,
            convergence_time=m.convergence_time,
        )


@dataclass
class MonteCarloReport:
    """
    Aggregated campaign results, runs sorted by id.

    Example:
        report = monte_carlo(load_scenario("quad_swarm"), samples=10)
        report.collision_count, report.converged_count
    """

    scenario: str
    master_seed: int
    radius_m: float
    runs: list[MonteCarloRun] = field(default_factory=list)

    @property
    def samples(self) -> int:
        return len(self.runs)

    @property
    def converged_count(self) -> int:
        return sum(r.converged for r in self.runs)

    @property
    def collision_count(self) -> int:
        """Number of runs that ended in a collision."""
        return sum(r.status == "collision" for r in self.runs)

    @property
    def diverged_count(self) -> int:
        return sum(r.status == "diverged" for r in self.runs)

    @property
    def failed_count(self) -> int:
        return sum(r.error is not None for r in self.runs)

    @property
    def fatal(self) -> bool:
        """True if any run collided, diverged or raised."""
        return bool(self.collision_count or self.diverged_count or self.failed_count)

    def to_frame(self) -> pd.DataFrame:
        """One row per run."""
        columns = [f.name for f in dataclasses.fields(MonteCarloRun)]
        rows = [dataclasses.asdict(r) for r in self.runs]
        return pd.DataFrame(rows, columns=columns)

    def to_dict(self) -> dict[str, Any]:
        frame = self.to_frame()
        times = frame["convergence_time"].dropna()
        return {
            "scenario": self.scenario,
            "master_seed": self.master_seed,
            "samples": self.samples,
            "radius_m": self.radius_m,
            "converged": self.converged_count,
            "collisions": self.collision_count,
            "diverged": self.diverged_count,
            "failed": self.failed_count,
            "min_distance": (
                None if frame.empty else float(frame["min_distance"].min())
            ),
            "max_formation_ratio": (
                None if frame.empty else float(frame["formation_ratio"].max())
            ),
            "convergence_time_mean": None if times.empty else float(times.mean()),
            "convergence_time_max": None if times.empty else float(times.max()),
        }


def sample_seeds(master_seed: int, samples: int) -> list[int]:
    """Independent 64-bit seeds for each sample."""
    children = SeedSequence(master_seed).spawn(samples)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]


def sample_scenarios(
    base: Scenario, samples: int, radius_m: float | None = None
) -> list[Scenario]:
    """
    One scenario per sample.

    With a positive radius every sample starts from a random ball of that
    radius and gets its own seed. The ball is centered on the desired center
    when the scenario has one, else on ``initial.center_m``. With radius 0
    every sample is the base scenario unchanged.
    """
    radius = base.monte_carlo.radius_m if radius_m is None else radius_m
    if radius == 0.0:
        return [base] * samples
    center = None if base.center is not None else base.initial.center_m
    initial = dataclasses.replace(
        base.initial, kind="random_ball", radius_m=radius, center_m=center
    )
    return [
        dataclasses.replace(base, seed=seed, initial=initial)
        for seed in sample_seeds(base.seed, samples)
    ]


def _run_sample(args: tuple[int, Scenario]) -> MonteCarloRun:
    """Run one sample; module level so worker processes can pickle it."""
    run_id, scenario = args
    try:
        model = FormationModel.from_scenario(scenario)
        log = run(scenario, model)
        return MonteCarloRun.from_metrics(run_id, compute_metrics(log, model))
    except FormationError as exc:
        return MonteCarloRun(run_id, scenario.seed, status="failed", error=str(exc))


def monte_carlo(
    base: Scenario,
    samples: int | None = None,
    radius_m: float | None = None,
    workers: int | None = None,
    progress: bool = False,
) -> MonteCarloReport:
    """
    Run a campaign.

    Args:
        base: Scenario whose ``monte_carlo`` section supplies the defaults
        samples: Number of runs
        radius_m: Radius of the initial-position ball
        workers: Worker processes; 1 runs in this process
        progress: Show a tqdm progress bar
    """
    samples = base.monte_carlo.samples if samples is None else samples
    radius = base.monte_carlo.radius_m if radius_m is None else radius_m
    workers = base.monte_carlo.workers if workers is None else workers
    jobs = list(enumerate(sample_scenarios(base, samples, radius)))
    logger.info(
        "monte carlo %s: %d samples, radius %g m, %d workers",
        base.name,
        samples,
        radius,
        workers,
    )

    bar = tqdm(total=samples, desc=base.name, unit="run", disable=not progress)
    results: list[MonteCarloRun] = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            futures = [executor.submit(_run_sample, job) for job in jobs]
            for future in as_completed(futures):
                results.append(future.result())
                bar.update(1)
    else:
        for job in jobs:
            results.append(_run_sample(job))
            bar.update(1)
    bar.close()

    results.sort(key=lambda r: r.run_id)
    report = MonteCarloReport(base.name, base.seed, radius, results)
    logger.info(
        "monte carlo %s: %d/%d converged, %d collisions, %d failed",
        base.name,
        report.converged_count,
        report.samples,
        report.collision_count,
        report.failed_count,
    )
    return report
