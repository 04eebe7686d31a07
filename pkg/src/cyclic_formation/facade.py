"""
Formation facade - one object per scenario.

This module provides a facade class that wraps the scenario, the resolved
controllers and the simulation engine behind a small API. The command line
only talks to this class.

Example:
    formation = Formation.load("hexagon")
    formation.certify().contraction_rate     # about 6.928
    result = formation.simulate()
    result.metrics.converged
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
from numpy.typing import ArrayLike, NDArray

from cyclic_formation.core.report import CertificationReport
from cyclic_formation.core.subspace import ConstraintMatrix
from cyclic_formation.extensions.center import geometric_center
from cyclic_formation.simulation.engine import TrajectoryLog, run
from cyclic_formation.simulation.export import (
    CERTIFICATION_FILE,
    write_certification_json,
    write_montecarlo,
    write_run,
)
from cyclic_formation.simulation.metrics import RunMetrics, compute_metrics
from cyclic_formation.simulation.model import FormationModel
from cyclic_formation.simulation.montecarlo import MonteCarloReport, monte_carlo
from cyclic_formation.simulation.scenario import Scenario, load_scenario

logger = logging.getLogger(__name__)

Controller = Callable[[ArrayLike], NDArray[np.float64]]


@dataclass
class SimulationResult:
    """
    A finished run with its summary.

    Attributes:
        log: Sampled series and events
        metrics: Convergence summary, certification included
        report: Certification of the scenario that was run
    """

    log: TrajectoryLog
    metrics: RunMetrics
    report: CertificationReport

    @property
    def fatal(self) -> bool:
        """True if the run stopped on a collision or a divergence."""
        return self.log.status != "completed"

    def write(self, directory: str | Path) -> dict[str, Path]:
        """Write every output file into ``directory``."""
        paths = write_run(self.log, self.metrics, directory)
        paths["certification"] = write_certification_json(
            self.report, Path(directory) / CERTIFICATION_FILE
        )
        return paths


class Formation:
    """
    Facade over one scenario.

    Provides a unified API for the constraint matrix, the controller, the
    certification checks, single runs and Monte Carlo campaigns. The
    underlying FormationModel is built on first use.

    Example:
        # Basic usage
        formation = Formation.load("quad_swarm")

        # Checks and runs
        report = formation.certify()
        result = formation.simulate()
        result.write("out/quad_swarm")

        # Overrides, as the command line applies them
        formation.with_overrides(seed=7, t_end=5.0).simulate()

    Attributes:
        scenario: The validated scenario
    """

    def __init__(self, scenario: Scenario) -> None:
        """
        Initialize the facade.

        Args:
            scenario: A validated scenario (see ``load_scenario``)
        """
        self.scenario = scenario

    @classmethod
    def load(cls, source: str | Path) -> Formation:
        """
        Load a scenario file or a bundled scenario by name.

        Raises:
            ScenarioError: If the source is missing or invalid
        """
        return cls(load_scenario(source))

    def with_overrides(
        self,
        seed: int | None = None,
        dt: float | None = None,
        t_end: float | None = None,
        samples: int | None = None,
        workers: int | None = None,
    ) -> Formation:
        """Return a facade over a copy of the scenario with overrides applied."""
        return Formation(
            self.scenario.with_overrides(
                seed=seed, dt=dt, t_end=t_end, samples=samples, workers=workers
            )
        )

    @cached_property
    def model(self) -> FormationModel:
        return FormationModel.from_scenario(self.scenario)

    # =========================================================================
    # Structure
    # =========================================================================

    def constraints(self) -> ConstraintMatrix:
        """Constraint matrix whose null space is the target formation."""
        return self.model.cm

    def controller(self) -> Controller:
        """
        The formation-layer control law without lag.

        The returned function maps a stacked 3n state to the commanded 3n
        velocity, with the shared quantities p̄ and x_0 evaluated at that same
        state.

        Example:
            u = formation.controller()(x)
        """
        model = self.model

        def control(x: ArrayLike) -> NDArray[np.float64]:
            state = np.asarray(x, dtype=float).reshape(-1)
            return model.formation_velocity(
                state, model.p_bar(state), geometric_center(state)
            )

        return control

    # =========================================================================
    # Checks and runs
    # =========================================================================

    def certify(self) -> CertificationReport:
        """Run every certification check that applies to the scenario."""
        return self.model.certify()

    def simulate(self, positions: ArrayLike | None = None) -> SimulationResult:
        """
        Run the scenario once.

        Args:
            positions: Optional (n, 3) initial positions replacing the
                scenario's ``initial`` section

        Returns:
            SimulationResult; a collision or divergence ends the run early and
            is reported through ``log.status`` and the event list
        """
        report = self.certify()
        if not report.passed:
            logger.warning(
                "scenario %s is not certified; simulating anyway", self.scenario.name
            )
        start = None if positions is None else np.asarray(positions, dtype=float)
        log = run(self.scenario, self.model, start)
        metrics = compute_metrics(log, self.model, report)
        return SimulationResult(log, metrics, report)

    def monte_carlo(
        self,
        samples: int | None = None,
        radius_m: float | None = None,
        workers: int | None = None,
        progress: bool = False,
    ) -> MonteCarloReport:
        """
        Run a seeded campaign over randomized initial positions.

        Args:
            samples: Number of runs, default from the scenario
            radius_m: Initial-position ball radius, default from the scenario
            workers: Worker processes, default from the scenario
            progress: Show a progress bar
        """
        return monte_carlo(self.scenario, samples, radius_m, workers, progress)

    def write_monte_carlo(
        self, report: MonteCarloReport, directory: str | Path
    ) -> dict[str, Path]:
        return write_montecarlo(report, directory)
