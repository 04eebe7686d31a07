"""Tests for factory classes."""

import numpy as np
import pytest

from cyclic_formation.exceptions import ScenarioError
from cyclic_formation.extensions.collision import CollisionVariant
from cyclic_formation.utils.factories import (
    CenterParamsFactory,
    CollisionParamsFactory,
    CyclicParamsFactory,
    QuadParamsFactory,
    ScenarioFactory,
    TrackerGainsFactory,
)


class TestParameterFactories:
    """Tests for the controller-parameter factories."""

    def test_cyclic_gains_follow_horizon(self):
        """CyclicParamsFactory should build one gain per neighbour."""
        params = CyclicParamsFactory(N=3, n=8)

        assert params.gains == (1.0, 1.0, 1.0)

    def test_center_params(self):
        """CenterParamsFactory should target a point ten metres up."""
        center = CenterParamsFactory()

        assert center.x_c == (0.0, 0.0, -10.0)
        assert center.k_c * center.tau < 1.0

    def test_collision_params(self):
        """CollisionParamsFactory should use the hard variant."""
        collision = CollisionParamsFactory()

        assert collision.variant == CollisionVariant.HARD
        assert collision.r1 < collision.r2

    def test_quad_params(self):
        """QuadParamsFactory should build a 1 kg airframe."""
        params = QuadParamsFactory()

        assert params.mass == 1.0
        assert params.inertia.shape == (3, 3)

    def test_tracker_gains(self):
        """TrackerGainsFactory should cap the speed at 3 m/s."""
        assert TrackerGainsFactory().v_max == 3.0


class TestScenarioFactory:
    """Tests for ScenarioFactory."""

    def test_creates_valid_scenario(self):
        """ScenarioFactory should build a plain point-mass hexagon."""
        scenario = ScenarioFactory()

        assert scenario.formation.kind == "polygon"
        assert scenario.size is None
        assert scenario.center is None
        assert scenario.vehicle.model == "point_mass"

    def test_names_are_unique(self):
        """Each scenario should get its own name."""
        assert ScenarioFactory().name != ScenarioFactory().name

    def test_traits(self):
        """The sized, centered and quadcopter traits should fill their sections."""
        scenario = ScenarioFactory(sized=True, centered=True, quadcopter=True)

        assert scenario.size.rho_m == 2.0
        assert scenario.center.x_c_m == (0.0, 0.0, -2.0)
        assert scenario.vehicle.model == "quadcopter"

    def test_create_validates(self):
        """Creating an invalid scenario should raise ScenarioError."""
        with pytest.raises(ScenarioError, match="sim.t_end_s"):
            ScenarioFactory(sim__t_end_s=-1.0)

    def test_build_skips_validation(self):
        """build should return the scenario without validating it."""
        scenario = ScenarioFactory.build(sim__t_end_s=-1.0)

        assert scenario.sim.t_end_s == -1.0

    def test_sized_scenario_uses_lag(self):
        """A sized scenario should switch the lag schedule on."""
        scenario = ScenarioFactory(sized=True)

        assert scenario.lag_active
        assert np.isclose(scenario.dt, 0.01)
