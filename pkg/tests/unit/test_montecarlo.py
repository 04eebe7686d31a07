"""Unit tests for Monte Carlo campaigns."""

import os

import numpy as np
import pytest

from cyclic_formation.facade import Formation
from cyclic_formation.simulation.montecarlo import (
    MonteCarloRun,
    monte_carlo,
    sample_scenarios,
    sample_seeds,
)
from cyclic_formation.simulation.scenario import ControllerSpec


class TestSampling:
    """Tests for per-sample seeds and scenarios."""

    def test_seeds_reproducible(self):
        """The same master seed should give the same, distinct seeds."""
        seeds = sample_seeds(42, 5)

        assert seeds == sample_seeds(42, 5)
        assert len(set(seeds)) == 5

    def test_zero_radius_repeats_base(self, scenario_factory):
        """Radius 0 should reuse the base scenario for every sample."""
        base = scenario_factory()

        samples = sample_scenarios(base, 3, radius_m=0.0)

        assert all(s is base for s in samples)

    def test_positive_radius(self, scenario_factory):
        """Each sample should get its own seed and the campaign radius."""
        base = scenario_factory(centered=True, initial__center_m=(9.0, 9.0, 9.0))

        samples = sample_scenarios(base, 4, radius_m=3.0)

        assert len({s.seed for s in samples}) == 4
        assert all(s.initial.radius_m == 3.0 for s in samples)
        assert all(s.initial.kind == "random_ball" for s in samples)
        assert all(s.initial.center_m is None for s in samples)


class TestMonteCarlo:
    """Tests for running campaigns."""

    def test_single_sample(self, scenario_factory):
        """One sample should produce one run with id 0."""
        report = monte_carlo(scenario_factory(sim__t_end_s=0.2), samples=1)

        assert report.samples == 1
        assert report.runs[0].run_id == 0
        assert report.runs[0].status == "completed"
        assert report.failed_count == 0

    def test_zero_radius_runs_identical(self, scenario_factory):
        """Samples of an unchanged base should give identical results."""
        report = monte_carlo(
            scenario_factory(sim__t_end_s=0.2), samples=2, radius_m=0.0
        )

        first, second = report.runs
        assert first.formation_ratio == second.formation_ratio
        assert first.min_distance == second.min_distance

    def test_reproducible(self, scenario_factory):
        """The same base should reproduce the same campaign."""
        base = scenario_factory(sim__t_end_s=0.2)

        a = monte_carlo(base, samples=3, radius_m=2.0).to_frame()
        b = monte_carlo(base, samples=3, radius_m=2.0).to_frame()

        np.testing.assert_array_equal(a["min_distance"], b["min_distance"])

    def test_failed_sample_is_recorded(self, scenario_factory):
        """A sample that cannot start should be recorded, not raised."""
        base = scenario_factory(
            controller=ControllerSpec(horizon=5, gains=(1.0,) * 5), sim__t_end_s=0.2
        )

        report = monte_carlo(base, samples=1)

        assert report.failed_count == 1
        assert report.runs[0].status == "failed"
        assert report.fatal
        assert "N" in report.runs[0].error

    def test_summary(self, scenario_factory):
        """The summary should count runs and aggregate the table."""
        report = monte_carlo(scenario_factory(sim__t_end_s=0.2), samples=2)

        summary = report.to_dict()
        frame = report.to_frame()

        assert summary["samples"] == 2
        assert summary["collisions"] == 0
        assert summary["diverged"] == 0
        assert not report.fatal
        assert summary["convergence_time_mean"] is None
        assert list(frame.columns)[:3] == ["run_id", "seed", "status"]
        assert len(frame) == 2

    def test_run_record_defaults(self):
        """A bare run record should carry NaN placeholders."""
        record = MonteCarloRun(3, 7, "failed", error="boom")

        assert np.isnan(record.min_distance)
        assert not record.converged


@pytest.mark.slow
class TestQuadSwarmCampaign:
    """The bundled quadcopter collision campaign."""

    def test_hundred_runs_without_collision(self):
        """All 100 randomized quad_swarm runs should converge without a collision."""
        formation = Formation.load("quad_swarm")

        report = formation.monte_carlo(samples=100, workers=os.cpu_count() or 1)

        assert report.samples == 100
        assert report.collision_count == 0
        assert report.diverged_count == 0
        assert report.failed_count == 0
        assert report.converged_count == 100
        assert min(r.min_distance for r in report.runs) > 0.4
        assert not report.fatal
