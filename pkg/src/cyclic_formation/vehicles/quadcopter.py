"""
Quadcopter rigid-body model and two-level velocity tracking.

Conventions:
    - Inertial frame is Z-down (north-east-down); gravity is +g along e_z.
    - Attitude quaternions are scalar-first Hamilton quaternions mapping body
      vectors to the inertial frame, so R_ib (inertial to body) is R(q)^T.
    - Euler angles follow the ZYX (yaw, pitch, roll) sequence.

A swarm state is an (n, 13) array with columns
``[x, y, z, vx, vy, vz, qw, qx, qy, qz, p, q, r]``.

Example:
    params = QuadParams()
    tracker = VelocityTracker(TrackerGains(), params, n=1)
    state = QuadState.hover([0.0, 0.0, -2.0])
    hold = [[0.0, 0.0, 0.0]]
    thrust, moment = tracker.command(state.to_array()[None, :], hold, 0.002)
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.spatial.transform import Rotation

from cyclic_formation.exceptions import ParameterError

logger = logging.getLogger(__name__)

POS = slice(0, 3)
VEL = slice(3, 6)
ATT = slice(6, 10)
RATES = slice(10, 13)
STATE_DIM = 13


# =========================================================================
# Domain types
# =========================================================================


@dataclass(frozen=True, eq=False)
class QuadParams:
    """
    Attributes:
        mass: Vehicle mass in kg
        inertia: 3x3 symmetric positive definite inertia tensor (kg m^2)
        gravity: Gravitational acceleration in m/s^2
    """

    mass: float = 1.0
    inertia: NDArray[np.float64] = field(
        default_factory=lambda: np.diag([0.0082, 0.0082, 0.0149])
    )
    gravity: float = 9.81

    def __post_init__(self) -> None:
        if self.mass <= 0.0:
            raise ParameterError(f"mass must be positive, got {self.mass}")
        inertia = np.asarray(self.inertia, dtype=float)
        if inertia.shape != (3, 3) or not np.allclose(inertia, inertia.T):
            raise ParameterError("inertia must be a symmetric 3x3 matrix")
        try:
            np.linalg.cholesky(inertia)
        except np.linalg.LinAlgError:
            raise ParameterError("inertia must be positive definite") from None
        object.__setattr__(self, "inertia", inertia)

    @property
    def inertia_inv(self) -> NDArray[np.float64]:
        return np.linalg.inv(self.inertia)

    @property
    def hover_thrust(self) -> float:
        return self.mass * self.gravity


def _diag3(value: ArrayLike) -> NDArray[np.float64]:
    arr = np.asarray(value, dtype=float)
    return np.diag(arr) if arr.ndim == 1 else arr


@dataclass(frozen=True, eq=False)
class TrackerGains:
    """
    Velocity PID and attitude PD gains.

    Attributes:
        kp_v, ki_v, kd_v: Per-axis velocity PID gains
        K_p: Attitude proportional gain (3x3 or diagonal)
        K_d: Body-rate damping gain (3x3 or diagonal)
        yaw: Desired yaw psi_d in radians
        v_max: Speed cap on the commanded velocity in m/s
        max_tilt: Limit on commanded roll and pitch in radians
        thrust_floor: Minimum thrust as a fraction of hover thrust
        thrust_ceiling: Maximum thrust as a fraction of hover thrust
    """

    kp_v: tuple[float, float, float] = (2.0, 2.0, 3.0)
    ki_v: tuple[float, float, float] = (0.3, 0.3, 0.5)
    kd_v: tuple[float, float, float] = (0.0, 0.0, 0.0)
    K_p: NDArray[np.float64] = field(
        default_factory=lambda: np.diag([1.85, 1.85, 0.95])
    )
    K_d: NDArray[np.float64] = field(
        default_factory=lambda: np.diag([0.22, 0.22, 0.21])
    )
    yaw: float = 0.0
    v_max: float = 3.0
    max_tilt: float = float(np.deg2rad(35.0))
    thrust_floor: float = 0.1
    thrust_ceiling: float = 2.5

    def __post_init__(self) -> None:
        for name in ("kp_v", "ki_v", "kd_v"):
            vec = tuple(float(v) for v in np.asarray(getattr(self, name)).reshape(3))
            if any(v < 0.0 for v in vec):
                raise ParameterError(f"{name} must be non-negative")
            object.__setattr__(self, name, vec)
        for name in ("K_p", "K_d"):
            mat = _diag3(getattr(self, name))
            if (
                mat.shape != (3, 3)
                or np.linalg.eigvalsh(0.5 * (mat + mat.T)).min() < -1e-12
            ):
                raise ParameterError(f"{name} must be positive semidefinite")
            object.__setattr__(self, name, mat)
        if self.v_max <= 0.0:
            raise ParameterError("v_max must be positive")
        if not 0.0 < self.max_tilt < np.pi / 2:
            raise ParameterError("max_tilt must lie in (0, pi/2)")
        if not 0.0 <= self.thrust_floor < 1.0 < self.thrust_ceiling:
            raise ParameterError("need 0 <= thrust_floor < 1 < thrust_ceiling")


@dataclass(frozen=True)
class ThrustMoment:
    """Collective thrust (N, >= 0) and body moment (N m) for one vehicle."""

    thrust: float
    moment: tuple[float, float, float]
    saturated: bool = False

    def __post_init__(self) -> None:
        if self.thrust < 0.0:
            raise ParameterError("thrust must be non-negative")


@dataclass
class QuadState:
    """
    Attributes:
        position: Inertial position (m, Z down)
        velocity: Inertial velocity (m/s)
        attitude: Unit quaternion (w, x, y, z), body to inertial
        body_rates: Angular velocity in the body frame (rad/s)
    """

    position: NDArray[np.float64]
    velocity: NDArray[np.float64]
    attitude: NDArray[np.float64]
    body_rates: NDArray[np.float64]

    @classmethod
    def hover(cls, position: ArrayLike, yaw: float = 0.0) -> QuadState:
        q = euler_to_quaternion(yaw, 0.0, 0.0)
        return cls(np.asarray(position, float), np.zeros(3), q, np.zeros(3))

    @classmethod
    def from_array(cls, row: ArrayLike) -> QuadState:
        arr = np.asarray(row, dtype=float).reshape(STATE_DIM)
        return cls(arr[POS].copy(), arr[VEL].copy(), arr[ATT].copy(), arr[RATES].copy())

    def to_array(self) -> NDArray[np.float64]:
        return np.concatenate(
            [self.position, self.velocity, self.attitude, self.body_rates]
        ).astype(float)


# =========================================================================
# Quaternions
# =========================================================================


def _to_scipy(q: NDArray) -> Rotation:
    return Rotation.from_quat(np.asarray(q)[..., [1, 2, 3, 0]])


def _from_scipy(r: Rotation) -> NDArray[np.float64]:
    return np.asarray(r.as_quat())[..., [3, 0, 1, 2]]


def quat_multiply(a: ArrayLike, b: ArrayLike) -> NDArray[np.float64]:
    """Hamilton product a ⊙ b for scalar-first quaternions (broadcasts)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    aw, ax, ay, az = np.moveaxis(a, -1, 0)
    bw, bx, by, bz = np.moveaxis(b, -1, 0)
    return np.stack(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ],
        axis=-1,
    )


def quaternion_to_matrix(q: ArrayLike) -> NDArray[np.float64]:
    """Body-to-inertial rotation matrix R(q) = R_ib^T."""
    return np.asarray(_to_scipy(np.asarray(q, dtype=float)).as_matrix())


def euler_to_quaternion(yaw: ArrayLike, pitch: ArrayLike, roll: ArrayLike) -> NDArray:
    """Quaternion for the ZYX sequence (yaw, pitch, roll)."""
    angles = np.stack(np.broadcast_arrays(yaw, pitch, roll), axis=-1).astype(float)
    return _from_scipy(Rotation.from_euler("ZYX", angles))


def attitude_error(q: ArrayLike, q_d: ArrayLike) -> NDArray[np.float64]:
    """
    Rotation vector beta * n̂ of Δq = q^-1 ⊙ q_d, taken along the shortest path.

    The result is expressed in the body frame.
    """
    delta = _to_scipy(np.asarray(q, float)).inv() * _to_scipy(np.asarray(q_d, float))
    return np.asarray(delta.as_rotvec())


def normalize_attitudes(states: NDArray[np.float64]) -> NDArray[np.float64]:
    """Renormalize the quaternion columns of a swarm state in place."""
    q = states[:, ATT]
    states[:, ATT] = q / np.linalg.norm(q, axis=1, keepdims=True)
    return states


# =========================================================================
# Dynamics
# =========================================================================


def swarm_derivative(
    states: ArrayLike,
    thrust: ArrayLike,
    moment: ArrayLike,
    p: QuadParams,
) -> NDArray[np.float64]:
    """
    Time derivative of an (n, 13) swarm state under held thrust and moments.

        x' = v
        v' = R(q) (0, 0, -T/m) + (0, 0, g)
        q' = 1/2 q ⊙ (0, w)
        w' = I^-1 (M - w x I w)
    """
    s = np.atleast_2d(np.asarray(states, dtype=float))
    thrust = np.asarray(thrust, dtype=float).reshape(-1)
    moment = np.asarray(moment, dtype=float).reshape(-1, 3)
    q = s[:, ATT] / np.linalg.norm(s[:, ATT], axis=1, keepdims=True)
    omega = s[:, RATES]

    out = np.empty_like(s)
    out[:, POS] = s[:, VEL]
    body_force = np.zeros((s.shape[0], 3))
    body_force[:, 2] = -thrust / p.mass
    out[:, VEL] = np.einsum("nij,nj->ni", quaternion_to_matrix(q), body_force)
    out[:, 5] += p.gravity
    pure = np.column_stack([np.zeros(s.shape[0]), omega])
    out[:, ATT] = 0.5 * quat_multiply(q, pure)
    momentum = omega @ p.inertia.T
    out[:, RATES] = (moment - np.cross(omega, momentum)) @ p.inertia_inv.T
    return out


def quad_derivative(
    s: QuadState, tm: ThrustMoment, p: QuadParams
) -> NDArray[np.float64]:
    """Single-vehicle form of ``swarm_derivative``; returns a 13-vector."""
    return swarm_derivative(s.to_array()[None, :], [tm.thrust], [tm.moment], p)[0]


# =========================================================================
# Velocity tracking
# =========================================================================


def saturate_velocity(v: ArrayLike, v_max: float) -> NDArray[np.float64]:
    """
    Scale each 3-vector (row) of ``v`` down to norm ``v_max`` if it exceeds it.

    Raises:
        ParameterError: If v_max <= 0
    """
    if v_max <= 0.0:
        raise ParameterError(f"v_max must be positive, got {v_max}")
    arr = np.asarray(v, dtype=float)
    rows = arr.reshape(-1, 3)
    norms = np.linalg.norm(rows, axis=1, keepdims=True)
    scale = np.where(norms > v_max, v_max / np.where(norms > 0.0, norms, 1.0), 1.0)
    return (rows * scale).reshape(arr.shape)


def _attitude_command(
    accel: NDArray[np.float64], gains: TrackerGains, p: QuadParams
) -> tuple[NDArray, NDArray, NDArray]:
    """
    Thrust, desired quaternion and saturation flags for desired accelerations.

    The lateral channel solves the small-angle system
        [[-T s_psi, -T c_psi], [T c_psi, -T s_psi]] (phi, theta) = m (a_x, a_y).
    """
    hover = p.hover_thrust
    raw_thrust = p.mass * (p.gravity - accel[:, 2])
    thrust = np.clip(
        raw_thrust, gains.thrust_floor * hover, gains.thrust_ceiling * hover
    )
    saturated = thrust != raw_thrust

    s, c = np.sin(gains.yaw), np.cos(gains.yaw)
    ax, ay = accel[:, 0], accel[:, 1]
    roll = p.mass * (-s * ax + c * ay) / thrust
    pitch = p.mass * (-c * ax - s * ay) / thrust
    tilted = (np.abs(roll) > gains.max_tilt) | (np.abs(pitch) > gains.max_tilt)
    roll = np.clip(roll, -gains.max_tilt, gains.max_tilt)
    pitch = np.clip(pitch, -gains.max_tilt, gains.max_tilt)
    q_d = euler_to_quaternion(np.full_like(roll, gains.yaw), pitch, roll)
    return thrust, np.atleast_2d(q_d), saturated | tilted


def velocity_tracker(
    s: QuadState,
    v_desired: ArrayLike,
    gains: TrackerGains,
    p: QuadParams,
    integral: ArrayLike | None = None,
) -> ThrustMoment:
    """
    One evaluation of the velocity tracker for a single vehicle.

    a_d = kp e_v + ki * integral; T = m (g - a_dz); (phi, theta) from the
    small-angle system; q_d from (psi_d, theta, phi); M = K_p beta n̂ - K_d w.
    """
    e = np.asarray(v_desired, dtype=float).reshape(3) - s.velocity
    acc = np.asarray(gains.kp_v) * e
    if integral is not None:
        acc = acc + np.asarray(gains.ki_v) * np.asarray(integral, float).reshape(3)
    thrust, q_d, flagged = _attitude_command(acc[None, :], gains, p)
    moment = gains.K_p @ attitude_error(s.attitude, q_d[0]) - gains.K_d @ s.body_rates
    return ThrustMoment(float(thrust[0]), tuple(moment.tolist()), bool(flagged[0]))


class VelocityTracker:
    """
    Stateful PID velocity tracker for a swarm of n quadcopters.

    The integral of each vehicle is frozen while its thrust or tilt command
    saturates.

    Example:
        tracker = VelocityTracker(TrackerGains(), QuadParams(), n=6)
        thrust, moment = tracker.command(states, v_desired, dt=0.002)
    """

    def __init__(self, gains: TrackerGains, params: QuadParams, n: int) -> None:
        self.gains = gains
        self.params = params
        self.n = n
        self.reset()

    def reset(self) -> None:
        self.integral = np.zeros((self.n, 3))
        self.e_prev: NDArray[np.float64] | None = None
        self.saturated = np.zeros(self.n, dtype=bool)

    def command(
        self, states: ArrayLike, v_desired: ArrayLike, dt: float
    ) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """
        Return (thrust (n,), moment (n, 3)) and advance the PID state by dt.
        """
        s = np.atleast_2d(np.asarray(states, dtype=float))
        e = np.asarray(v_desired, dtype=float).reshape(-1, 3) - s[:, VEL]
        g = self.gains
        kp, ki, kd = (np.asarray(v) for v in (g.kp_v, g.ki_v, g.kd_v))
        trial = self.integral + e * dt
        if self.e_prev is None or dt <= 0.0:
            derivative = np.zeros_like(e)
        else:
            derivative = (e - self.e_prev) / dt
        accel = kp * e + ki * trial + kd * derivative
        thrust, q_d, flagged = _attitude_command(accel, self.gains, self.params)
        floored = thrust <= self.gains.thrust_floor * self.params.hover_thrust
        if np.any(floored & ~self.saturated):
            logger.warning(
                "thrust floor active on vehicles %s", np.flatnonzero(floored).tolist()
            )
        self.integral = np.where(flagged[:, None], self.integral, trial)
        self.e_prev = e
        self.saturated = flagged

        err = attitude_error(s[:, ATT], q_d)
        moment = err @ self.gains.K_p.T - s[:, RATES] @ self.gains.K_d.T
        return thrust, moment


FormationLayer = Callable[
    [NDArray[np.float64], NDArray[np.float64]], NDArray[np.float64]
]


def hierarchy_step(
    states: ArrayLike,
    layers: Sequence[FormationLayer],
    tracker: VelocityTracker,
    dt: float,
) -> list[ThrustMoment]:
    """
    Run both control levels once.

    Every formation layer maps (positions (n, 3), velocities (n, 3)) to a
    stacked velocity command; their sum is saturated at ``v_max`` and handed
    to the velocity tracker.
    """
    s = np.atleast_2d(np.asarray(states, dtype=float))
    pos, vel = s[:, POS], s[:, VEL]
    v_d = np.zeros(pos.size)
    for layer in layers:
        v_d = v_d + np.asarray(layer(pos, vel), dtype=float).reshape(-1)
    v_d = saturate_velocity(v_d.reshape(-1, 3), tracker.gains.v_max)
    thrust, moment = tracker.command(s, v_d, dt)
    return [
        ThrustMoment(float(t), tuple(m.tolist()), bool(f))
        for t, m, f in zip(thrust, moment, tracker.saturated, strict=True)
    ]
