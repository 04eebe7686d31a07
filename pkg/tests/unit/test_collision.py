"""Unit tests for repulsive-potential collision avoidance."""

import numpy as np
import pytest

from cyclic_formation.exceptions import CollisionError, DomainError, ParameterError
from cyclic_formation.extensions.collision import (
    CollisionParams,
    CollisionVariant,
    check_collisions,
    collision_control,
    line_of_sight_speed,
    min_pairwise_distance,
    rpf_force,
    rpf_value,
)


@pytest.fixture
def hard():
    return CollisionParams(r1=0.4, r2=1.2)


def pair(distance):
    return np.array([0.0, 0.0, 0.0, distance, 0.0, 0.0])


class TestCollisionParams:
    """Tests for CollisionParams validation."""

    def test_variant_from_string(self):
        """A variant name should be coerced to the enum."""
        assert CollisionParams(0.4, 1.2, "los").variant is CollisionVariant.LOS

    @pytest.mark.parametrize("r1,r2", [(0.0, 1.0), (1.0, 1.0), (1.2, 0.4)])
    def test_radii(self, r1, r2):
        """Radii outside 0 < r1 < r2 should raise ParameterError."""
        with pytest.raises(ParameterError):
            CollisionParams(r1, r2)

    def test_tanh_needs_rho(self):
        """The tanh variant should require a target spacing."""
        with pytest.raises(ParameterError):
            CollisionParams(0.4, 1.2, CollisionVariant.TANH)

    def test_factory(self):
        """CollisionParamsFactory should build the hard variant."""
        from cyclic_formation.utils.factories import CollisionParamsFactory

        assert CollisionParamsFactory().variant is CollisionVariant.HARD


class TestPotential:
    """Tests for the repulsive force and potential."""

    @pytest.mark.parametrize("d", [0.45, 0.6, 0.9, 1.15])
    def test_force_is_minus_gradient(self, hard, d):
        """A central difference of V should give -f_c."""
        h = 1e-6

        slope = (rpf_value(d + h, hard) - rpf_value(d - h, hard)) / (2.0 * h)

        assert np.isclose(-slope, rpf_force(d, hard), rtol=1e-5)

    def test_zero_beyond_detection(self, hard):
        """Force and potential should vanish at and beyond r2."""
        assert rpf_force(1.2, hard) == 0.0
        assert rpf_value(1.2, hard) == 0.0
        assert rpf_force(3.0, hard) == 0.0

    def test_continuous_at_r2(self, hard):
        """The potential should approach zero from inside the zone."""
        assert abs(rpf_value(1.2 - 1e-7, hard)) < 1e-12

    def test_blows_up_near_r1(self, hard):
        """The potential should grow without bound towards r1."""
        assert rpf_value(0.4001, hard) > rpf_value(0.41, hard) > rpf_value(0.6, hard)
        assert rpf_force(0.4001, hard) > 1e3

    @pytest.mark.parametrize("d", [0.4, 0.2])
    def test_domain(self, hard, d):
        """d <= r1 should raise DomainError."""
        with pytest.raises(DomainError):
            rpf_force(d, hard)
        with pytest.raises(DomainError):
            rpf_value(d, hard)

    def test_vectorized(self, hard):
        """Array input should give an array of the same shape."""
        out = rpf_force(np.array([0.5, 1.0, 2.0]), hard)

        assert out.shape == (3,)
        assert out[2] == 0.0


class TestCollisionChecks:
    """Tests for distance helpers and collision detection."""

    def test_min_distance(self):
        """min_pairwise_distance should find the closest pair."""
        x = np.array([0, 0, 0, 3, 0, 0, 0, 1.5, 0], dtype=float)

        assert np.isclose(min_pairwise_distance(x), 1.5)

    def test_single_robot(self):
        """One robot should have infinite clearance."""
        assert min_pairwise_distance(np.zeros(3)) == float("inf")

    def test_collision_error_lists_pairs(self):
        """A pair within r1 should raise CollisionError naming it."""
        x = np.array([0, 0, 0, 0.3, 0, 0, 5, 0, 0], dtype=float)

        with pytest.raises(CollisionError) as exc:
            check_collisions(x, 0.4)

        assert exc.value.pairs == [(0, 1)]
        assert np.isclose(exc.value.min_distance, 0.3)

    def test_collision_error_is_domain_error(self):
        """CollisionError should be catchable as DomainError."""
        with pytest.raises(DomainError):
            check_collisions(pair(0.1), 0.4)

    def test_line_of_sight_speed(self):
        """Robots moving apart should have positive closing speed."""
        v = np.array([-1.0, 0.0, 0.0, 1.0, 0.0, 0.0])

        vs = line_of_sight_speed(pair(1.0), v)

        assert np.isclose(vs[0, 1], 2.0)
        assert np.isclose(vs[1, 0], 2.0)
        assert vs[0, 0] == 0.0


class TestCollisionControl:
    """Tests for the escape velocity."""

    def test_outside_zone_is_zero(self, hard):
        """Robots farther apart than r2 should get no correction."""
        np.testing.assert_array_equal(collision_control(pair(2.0), hard), 0.0)

    def test_pushes_apart(self, hard):
        """Two close robots should be pushed away from each other."""
        u = collision_control(pair(0.8), hard).reshape(2, 3)

        assert u[0, 0] < 0.0 < u[1, 0]
        np.testing.assert_allclose(u.sum(axis=0), 0.0, atol=1e-12)
        assert np.isclose(u[1, 0], 0.8 * rpf_force(0.8, hard))

    def test_collision_raises(self, hard):
        """A pair inside r1 should raise CollisionError."""
        with pytest.raises(CollisionError):
            collision_control(pair(0.3), hard)

    def test_los_gates_separating_pairs(self):
        """The los variant should ignore robots already moving apart."""
        cp = CollisionParams(0.4, 1.2, CollisionVariant.LOS)
        apart = np.array([-1.0, 0.0, 0.0, 1.0, 0.0, 0.0])

        np.testing.assert_array_equal(collision_control(pair(0.8), cp, apart), 0.0)

    def test_los_matches_hard_when_closing(self, hard):
        """Closing robots should get the hard-variant velocity."""
        cp = CollisionParams(0.4, 1.2, CollisionVariant.LOS)
        closing = np.array([1.0, 0.0, 0.0, -1.0, 0.0, 0.0])

        np.testing.assert_allclose(
            collision_control(pair(0.8), cp, closing),
            collision_control(pair(0.8), hard),
        )

    def test_los_needs_velocities(self):
        """The los variant without velocities should raise ParameterError."""
        cp = CollisionParams(0.4, 1.2, CollisionVariant.LOS)

        with pytest.raises(ParameterError):
            collision_control(pair(0.8), cp)

    def test_tanh_variant(self):
        """The tanh variant should weight pairs by k tanh(rho - d)."""
        cp = CollisionParams(0.4, 1.2, CollisionVariant.TANH, k_coll=2.0, rho=1.0)

        u = collision_control(pair(0.8), cp).reshape(2, 3)

        assert np.isclose(u[1, 0], 2.0 * np.tanh(0.2) * 0.8)
