"""Unit tests for the simulation engine."""

import numpy as np
import pytest

from cyclic_formation.core.subspace import regular_polygon
from cyclic_formation.exceptions import ParameterError
from cyclic_formation.extensions.center import geometric_center
from cyclic_formation.extensions.size import SizeParams, size_recursion
from cyclic_formation.facade import Formation
from cyclic_formation.simulation.engine import (
    LagSchedule,
    initial_positions,
    run,
    streams,
)
from cyclic_formation.simulation.model import FormationModel
from cyclic_formation.simulation.scenario import (
    CollisionSpec,
    ControllerSpec,
    DisturbanceSpec,
    VehicleSpec,
    load_scenario,
)


def hexagon_positions(side=1.0):
    return [tuple(p) for p in regular_polygon(6, side=side).reshape(6, 3)]


class TestLagSchedule:
    """Tests for window bookkeeping."""

    def test_first_two_windows_share_sample(self):
        """Windows 0 and 1 should both hold the t = 0 sample."""
        lag = LagSchedule(10)

        held = [lag.record(v) for v in ("a", "b", "c", "d")]

        assert held == ["a", "a", "b", "c"]

    def test_boundaries(self):
        """Boundaries should fall every steps_per_window steps."""
        lag = LagSchedule.for_step(0.1, 0.01)

        assert lag.steps_per_window == 10
        assert lag.is_boundary(20) and not lag.is_boundary(25)
        assert lag.window(25) == 2

    def test_fractional_window(self):
        """tau that is not a whole number of steps should raise."""
        with pytest.raises(ParameterError):
            LagSchedule.for_step(0.1, 0.03)


class TestInitialPositions:
    """Tests for initial placement."""

    def test_streams_are_reproducible(self):
        """The same seed should give the same generators."""
        a, _ = streams(7)
        b, _ = streams(7)

        np.testing.assert_array_equal(a.random(5), b.random(5))

    def test_random_ball(self, scenario_factory):
        """Random placement should stay inside the ball."""
        scenario = scenario_factory(initial__center_m=(1.0, 2.0, 3.0))
        model = FormationModel.from_scenario(scenario)

        pos = initial_positions(model, streams(scenario.seed)[0])

        assert pos.shape == (6, 3)
        assert np.all(np.linalg.norm(pos - [1.0, 2.0, 3.0], axis=1) <= 2.0)

    def test_minimum_separation(self, scenario_factory):
        """Placement should honour the minimum separation."""
        scenario = scenario_factory(initial__min_separation_m=0.5)
        model = FormationModel.from_scenario(scenario)

        pos = initial_positions(model, streams(scenario.seed)[0])

        gaps = np.linalg.norm(pos[:, None] - pos[None, :], axis=2)
        assert gaps[np.triu_indices(6, k=1)].min() > 0.5

    def test_impossible_separation(self, scenario_factory):
        """An unreachable separation should raise ParameterError."""
        scenario = scenario_factory(
            initial__radius_m=0.1, initial__min_separation_m=5.0
        )
        model = FormationModel.from_scenario(scenario)

        with pytest.raises(ParameterError):
            initial_positions(model, streams(scenario.seed)[0])

    def test_template(self, scenario_factory):
        """Template placement without jitter should reproduce the target."""
        scenario = scenario_factory(
            initial__kind="template", initial__center_m=(0.0, 0.0, -1.0)
        )
        model = FormationModel.from_scenario(scenario)

        pos = initial_positions(model, streams(scenario.seed)[0])

        assert model.formation_error(pos.reshape(-1)) < 1e-12
        np.testing.assert_allclose(pos.mean(axis=0), [0.0, 0.0, -1.0], atol=1e-12)


class TestRun:
    """Tests for point-mass runs."""

    def test_deterministic(self, scenario_factory):
        """The same scenario should produce identical logs."""
        scenario = scenario_factory(sim__t_end_s=0.5)

        a, b = run(scenario), run(scenario)

        np.testing.assert_array_equal(np.asarray(a.positions), np.asarray(b.positions))

    def test_log_grid(self, scenario_factory):
        """Samples should land on the log interval, including t_end."""
        log = run(scenario_factory(sim__t_end_s=0.5))

        np.testing.assert_allclose(log.times, np.arange(11) * 0.05, atol=1e-12)
        assert log.steps == 50
        assert log.status == "completed"

    def test_zero_gain_stays_put(self, scenario_factory):
        """With zero gains nothing should move."""
        log = run(scenario_factory(controller__gains=(0.0,)))

        np.testing.assert_array_equal(log.final_positions, log.initial_positions)
        assert max(log.control_norm) == 0.0

    def test_formation_error_decays(self, scenario_factory):
        """Unit gain should shrink the error at least as fast as exp(-t)."""
        log = run(scenario_factory(sim__t_end_s=2.0))

        errors = log.series("formation_error")
        assert errors[-1] < 0.2 * errors[0]

    def test_indices_assigned(self, scenario_factory):
        """The log should record a permutation of the robots."""
        log = run(scenario_factory(sim__t_end_s=0.1))

        assert sorted(log.order) == list(range(6))
        assert log.order[0] == 0

    def test_window_events(self, scenario_factory):
        """A lagged run should log one event per window after the first."""
        log = run(scenario_factory(sized=True, sim__t_end_s=1.0))

        windows = [e for e in log.events if e.kind == "window"]
        assert len(windows) == 10
        assert windows[0].step == 10

    def test_center_follows_lag_recursion(self, scenario_factory):
        """Window samples of x_0 should obey the lagged center recursion."""
        scenario = scenario_factory(
            centered=True, initial__center_m=(3.0, 0.0, 0.0), sim__t_end_s=2.0
        )
        log = run(scenario)
        x_c = np.array(scenario.center.x_c_m)
        gain = scenario.center.k_c * scenario.lag.tau_s

        expected = [geometric_center(log.positions[0])]
        previous = expected[0]
        for k in range(20):
            expected.append(expected[k] + gain * (x_c - previous))
            previous = expected[k]

        sampled = [geometric_center(log.positions[2 * k]) for k in range(21)]
        np.testing.assert_allclose(sampled, expected, atol=1e-9)

    def test_size_follows_recursion(self, scenario_factory):
        """On the polygon subspace p̄ should match the window recursion."""
        scenario = scenario_factory(
            sized=True,
            controller__gains=(0.5,),
            initial__kind="positions",
            initial__positions_m=hexagon_positions(1.0),
        )
        log = run(scenario)
        size = SizeParams(2.0, float(np.deg2rad(5.0)), tau=0.1)

        expected = size_recursion(0.5, 20, 1.0, size)

        sampled = log.series("p_bar")[::2]
        np.testing.assert_allclose(sampled, expected, atol=1e-6)

    def test_disturbed_twin(self, scenario_factory):
        """A disturbance should log the distance to the nominal twin."""
        log = run(scenario_factory(disturbance=DisturbanceSpec(), sim__t_end_s=0.5))

        assert len(log.delta_z) == len(log.times)
        assert log.delta_z[0] == 0.0
        assert log.d_max > 0.0
        assert max(log.delta_z) > 0.0

    def test_collision_stops_run(self, scenario_factory):
        """Robots starting inside r1 should stop the run at t = 0."""
        positions = hexagon_positions(2.0)
        x0, y0, z0 = positions[0]
        positions[1] = (x0 + 0.3, y0, z0)

        log = run(
            scenario_factory(
                collision=CollisionSpec(),
                initial__kind="positions",
                initial__positions_m=positions,
            )
        )

        assert log.status == "collision"
        assert log.times == [0.0]
        assert [e.kind for e in log.events if e.kind == "collision"] == ["collision"]

    def test_quadcopters_fly(self, scenario_factory):
        """A quadcopter swarm should complete a short run."""
        scenario = scenario_factory(
            quadcopter=True, sim__t_end_s=0.2, sim__dt_s=0.002, sim__log_interval_s=0.01
        )

        log = run(scenario)

        assert log.status == "completed"
        assert len(log.times) == 21
        assert np.all(np.isfinite(log.final_positions))

    def test_speed_limit_logged(self, scenario_factory):
        """A velocity command above v_max should log a speed_limit event."""
        scenario = scenario_factory(
            vehicle=VehicleSpec(model="quadcopter", v_max_mps=0.05),
            sim__t_end_s=0.1,
            sim__dt_s=0.002,
            sim__log_interval_s=0.01,
        )

        log = run(scenario)

        limited = [e for e in log.events if e.kind == "speed_limit"]
        assert log.status == "completed"
        assert limited
        assert limited[0].step == 0


@pytest.mark.slow
class TestBundledRuns:
    """Longer runs of bundled scenarios."""

    def test_size_polygon_converges(self):
        """The tilted size-controlled hexagon should reach side 2 m."""
        from cyclic_formation.simulation.metrics import compute_metrics

        scenario = load_scenario("size_polygon")
        model = FormationModel.from_scenario(scenario)

        metrics = compute_metrics(run(scenario, model), model)

        assert metrics.converged_shape
        assert metrics.converged_size

    def test_tetrahedron_quads_converge(self):
        """Four quadcopters capped at 0.7 m/s should settle shape, size and center."""
        formation = Formation.load("tetrahedron_quads")

        metrics = formation.simulate().metrics

        assert formation.scenario.vehicle.v_max_mps == 0.7
        assert metrics.status == "completed"
        assert metrics.collisions == 0
        assert metrics.min_distance > formation.scenario.collision.r1_m
        assert metrics.converged_shape
        assert metrics.converged_size
        assert metrics.converged_center
        assert metrics.formation_ratio < 1e-4
        assert metrics.max_side_error < 0.005
        assert metrics.center_error_final < 0.01


@pytest.mark.slow
class TestPolygonCampaign:
    """Seeded point-mass polygon runs checked against their certificates."""

    @pytest.mark.parametrize("seed", range(50))
    def test_converges_at_certified_rate(self, scenario_factory, seed):
        """The decay slope should sit within 10% of the certified rate."""
        n = (4, 6, 8)[seed % 3]
        formation = Formation(
            scenario_factory(
                formation__n=n,
                seed=seed,
                sim__t_end_s=30.0,
                sim__dt_s=0.02,
                sim__log_interval_s=0.1,
            )
        )

        rate = formation.certify().contraction_rate
        metrics = formation.simulate().metrics

        assert metrics.formation_ratio < 1e-6
        assert metrics.measured_rate == pytest.approx(rate, rel=0.1)

    @pytest.mark.parametrize("seed", range(10))
    def test_two_neighbours_need_less_effort(self, scenario_factory, seed):
        """Two neighbours at gain 2 should peak below one neighbour at 6.928."""

        def peak(controller):
            scenario = scenario_factory(
                controller=controller,
                seed=seed,
                sim__t_end_s=1.0,
                sim__dt_s=0.005,
                sim__log_interval_s=0.005,
            )
            return Formation(scenario).simulate().metrics

        wide = peak(ControllerSpec(horizon=2, gains=(2.0, 2.0)))
        narrow = peak(ControllerSpec(horizon=1, gains=(4.0 * np.sqrt(3.0),)))

        assert wide.peak_control_norm < narrow.peak_control_norm
