"""Unit tests for the quadcopter model and velocity tracking."""

import numpy as np
import pytest

from cyclic_formation.exceptions import ParameterError
from cyclic_formation.utils.factories import QuadParamsFactory, TrackerGainsFactory
from cyclic_formation.vehicles.quadcopter import (
    ATT,
    VEL,
    QuadParams,
    QuadState,
    ThrustMoment,
    TrackerGains,
    VelocityTracker,
    attitude_error,
    euler_to_quaternion,
    hierarchy_step,
    normalize_attitudes,
    quad_derivative,
    quat_multiply,
    quaternion_to_matrix,
    saturate_velocity,
    swarm_derivative,
    velocity_tracker,
)

IDENTITY = np.array([1.0, 0.0, 0.0, 0.0])


@pytest.fixture
def params():
    return QuadParamsFactory()


@pytest.fixture
def gains():
    return TrackerGainsFactory()


class TestParams:
    """Tests for vehicle and tracker parameter validation."""

    def test_hover_thrust(self, params):
        """Hover thrust should be m g."""
        assert np.isclose(params.hover_thrust, 9.81)

    @pytest.mark.parametrize(
        "inertia",
        [np.eye(2), np.array([[1.0, 0.5, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])],
    )
    def test_bad_inertia(self, inertia):
        """Non-square or asymmetric inertia should be rejected."""
        with pytest.raises(ParameterError):
            QuadParams(inertia=inertia)

    def test_indefinite_inertia(self):
        """An indefinite inertia should be rejected."""
        with pytest.raises(ParameterError):
            QuadParams(inertia=np.diag([1.0, -1.0, 1.0]))

    def test_diagonal_gains_promoted(self):
        """Diagonal attitude gains should become 3x3 matrices."""
        g = TrackerGains(K_p=[1.0, 2.0, 3.0])

        np.testing.assert_array_equal(g.K_p, np.diag([1.0, 2.0, 3.0]))

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"kp_v": (-1.0, 1.0, 1.0)},
            {"v_max": 0.0},
            {"max_tilt": 2.0},
            {"thrust_ceiling": 0.9},
        ],
    )
    def test_bad_gains(self, kwargs):
        """Invalid tracker gains should raise ParameterError."""
        with pytest.raises(ParameterError):
            TrackerGains(**kwargs)

    def test_negative_thrust(self):
        """A negative thrust command should be rejected."""
        with pytest.raises(ParameterError):
            ThrustMoment(-1.0, (0.0, 0.0, 0.0))


class TestQuaternions:
    """Tests for quaternion helpers."""

    def test_identity_product(self, formation_rng):
        """The identity quaternion should be neutral."""
        q = formation_rng.standard_normal(4)

        np.testing.assert_allclose(quat_multiply(IDENTITY, q), q)
        np.testing.assert_allclose(quat_multiply(q, IDENTITY), q)

    def test_product_composes_rotations(self):
        """R(a b) should equal R(a) R(b)."""
        a = euler_to_quaternion(0.3, -0.2, 0.5)
        b = euler_to_quaternion(-1.1, 0.4, 0.1)

        np.testing.assert_allclose(
            quaternion_to_matrix(quat_multiply(a, b)),
            quaternion_to_matrix(a) @ quaternion_to_matrix(b),
            atol=1e-12,
        )

    def test_yaw_turns_x_into_y(self):
        """A 90 degree yaw should map the body x axis onto inertial y."""
        r = quaternion_to_matrix(euler_to_quaternion(np.pi / 2, 0.0, 0.0))

        np.testing.assert_allclose(r @ [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], atol=1e-12)

    def test_attitude_error(self):
        """The error to a small yaw should be that yaw about body z."""
        err = attitude_error(IDENTITY, euler_to_quaternion(0.1, 0.0, 0.0))

        np.testing.assert_allclose(err, [0.0, 0.0, 0.1], atol=1e-12)

    def test_attitude_error_zero(self):
        """Equal attitudes should give zero error."""
        q = euler_to_quaternion(0.4, 0.2, -0.3)

        np.testing.assert_allclose(attitude_error(q, q), 0.0, atol=1e-12)

    def test_normalize(self):
        """normalize_attitudes should rescale quaternion columns to unit norm."""
        states = np.zeros((2, 13))
        states[:, ATT] = [[2.0, 0.0, 0.0, 0.0], [0.0, 0.0, 3.0, 4.0]]

        normalize_attitudes(states)

        np.testing.assert_allclose(np.linalg.norm(states[:, ATT], axis=1), 1.0)


class TestDynamics:
    """Tests for the rigid-body equations."""

    def test_hover_is_fixed_point(self, params):
        """Hover thrust and zero moment should give a zero derivative."""
        state = QuadState.hover([1.0, 2.0, -3.0], yaw=0.7)
        tm = ThrustMoment(params.hover_thrust, (0.0, 0.0, 0.0))

        np.testing.assert_allclose(quad_derivative(state, tm, params), 0.0, atol=1e-12)

    def test_free_fall(self, params):
        """Zero thrust should accelerate at +g along the down axis."""
        deriv = quad_derivative(
            QuadState.hover([0.0, 0.0, 0.0]), ThrustMoment(0.0, (0.0, 0.0, 0.0)), params
        )

        np.testing.assert_allclose(deriv[VEL], [0.0, 0.0, 9.81])

    def test_pitch_down_accelerates_forward(self, params):
        """A negative pitch under hover thrust should accelerate along +x."""
        state = QuadState(
            np.zeros(3), np.zeros(3), euler_to_quaternion(0.0, -0.2, 0.0), np.zeros(3)
        )
        tm = ThrustMoment(params.hover_thrust, (0.0, 0.0, 0.0))

        assert quad_derivative(state, tm, params)[3] > 0.0

    def test_moment_spins_up(self, params):
        """A yaw moment should produce w' = M / I_zz."""
        state = QuadState.hover([0.0, 0.0, 0.0])
        tm = ThrustMoment(params.hover_thrust, (0.0, 0.0, 0.1))

        deriv = quad_derivative(state, tm, params)

        assert np.isclose(deriv[12], 0.1 / params.inertia[2, 2])

    def test_swarm_matches_single(self, params):
        """The swarm form should agree row by row with the single form."""
        rows = [QuadState.hover([i, 0.0, -1.0], yaw=0.2 * i) for i in range(3)]
        thrust = [9.0, 9.81, 11.0]
        moment = [[0.01, 0.0, 0.0], [0.0, 0.02, 0.0], [0.0, 0.0, 0.03]]

        swarm = swarm_derivative([r.to_array() for r in rows], thrust, moment, params)

        for i, row in enumerate(rows):
            tm = ThrustMoment(thrust[i], tuple(moment[i]))
            np.testing.assert_allclose(swarm[i], quad_derivative(row, tm, params))


class TestVelocityTracking:
    """Tests for saturation and the velocity tracker."""

    def test_saturate_long_vector(self):
        """A vector over v_max should be scaled to v_max."""
        out = saturate_velocity([3.0, 4.0, 0.0], 1.0)

        np.testing.assert_allclose(out, [0.6, 0.8, 0.0])

    def test_saturate_keeps_short_vectors(self):
        """Rows under the cap, including zero, should be unchanged."""
        v = np.array([[0.1, 0.2, 0.0], [0.0, 0.0, 0.0]])

        np.testing.assert_array_equal(saturate_velocity(v, 1.0), v)

    def test_saturate_bad_cap(self):
        """v_max <= 0 should raise ParameterError."""
        with pytest.raises(ParameterError):
            saturate_velocity([1.0, 0.0, 0.0], 0.0)

    def test_hover_command(self, gains, params):
        """Holding position at hover should ask for hover thrust only."""
        tm = velocity_tracker(QuadState.hover([0, 0, -2]), [0, 0, 0], gains, params)

        assert np.isclose(tm.thrust, params.hover_thrust)
        np.testing.assert_allclose(tm.moment, 0.0, atol=1e-12)
        assert not tm.saturated

    def test_climb_saturates_thrust(self, gains, params):
        """A huge climb demand should hit the thrust ceiling."""
        tm = velocity_tracker(QuadState.hover([0, 0, 0]), [0, 0, -100], gains, params)

        assert np.isclose(tm.thrust, gains.thrust_ceiling * params.hover_thrust)
        assert tm.saturated

    def test_integral_accumulates(self, gains, params):
        """An unsaturated error should accumulate in the integral."""
        tracker = VelocityTracker(gains, params, n=1)
        state = QuadState.hover([0.0, 0.0, 0.0]).to_array()[None, :]

        tracker.command(state, [[0.5, 0.0, 0.0]], dt=0.01)

        np.testing.assert_allclose(tracker.integral, [[0.005, 0.0, 0.0]])

    def test_integral_frozen_when_saturated(self, gains, params):
        """A saturated vehicle should keep its integral."""
        tracker = VelocityTracker(gains, params, n=1)
        state = QuadState.hover([0.0, 0.0, 0.0]).to_array()[None, :]

        tracker.command(state, [[0.0, 0.0, -100.0]], dt=0.01)

        np.testing.assert_array_equal(tracker.integral, 0.0)
        assert tracker.saturated[0]

    def test_hierarchy_saturates_sum(self, params):
        """The summed layer command should be capped at v_max."""
        tracker = VelocityTracker(TrackerGains(v_max=1.0), params, n=1)
        state = QuadState.hover([0.0, 0.0, 0.0]).to_array()[None, :]

        def layer(pos, vel):
            return np.ones_like(pos) * [1.0, 0.0, 0.0]

        out = hierarchy_step(state, [layer, layer], tracker, dt=0.01)

        assert len(out) == 1
        np.testing.assert_allclose(tracker.integral, [[0.01, 0.0, 0.0]])
