"""
Fixed-step simulation of point-mass and quadcopter swarms.

Shared quantities (the mean side error p̄ and the geometric center x_0) are
sampled at the start of every lag window and applied one window late: window
k uses the sample of window k - 1, and windows 0 and 1 both use the sample
taken at t = 0. Angle disturbances are resampled per robot at every window
boundary.

When a disturbance is configured, an undisturbed twin of the swarm is
integrated alongside, giving the distance ‖V̄(x - x_nominal)‖ between the two
and the disturbance norm ‖V̄(u_disturbed - u_nominal)‖ along the disturbed
trajectory.

Example:
    scenario = load_scenario("hexagon")
    log = run(scenario)
    log.final_positions
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from numpy.random import Generator, SeedSequence
from numpy.typing import NDArray

from cyclic_formation.exceptions import (
    CollisionError,
    DivergenceError,
    ParameterError,
)
from cyclic_formation.extensions.center import geometric_center
from cyclic_formation.extensions.collision import (
    check_collisions,
    min_pairwise_distance,
)
from cyclic_formation.simulation.indexing import assign_indices
from cyclic_formation.simulation.integrators import get_stepper
from cyclic_formation.simulation.model import FormationModel
from cyclic_formation.simulation.scenario import Scenario
from cyclic_formation.vehicles.quadcopter import (
    ATT,
    POS,
    STATE_DIM,
    VEL,
    QuadParams,
    QuadState,
    VelocityTracker,
    hierarchy_step,
    normalize_attitudes,
    saturate_velocity,
    swarm_derivative,
)

logger = logging.getLogger(__name__)

MAX_PLACEMENT_ATTEMPTS = 10_000


# =========================================================================
# Log types
# =========================================================================


@dataclass(frozen=True)
class Event:
    """
    Something that happened during a run, stamped on the integration grid.

    Kinds: ``window``, ``collision``, ``divergence``, ``saturation``,
    ``speed_limit``, ``index_tie``.
    """

    kind: str
    t: float
    step: int
    message: str = ""
    data: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "t": self.t,
            "step": self.step,
            "message": self.message,
            "data": self.data,
        }


@dataclass
class TrajectoryLog:
    """
    Sampled series of one run. Every series shares the ``times`` grid.

    ``status`` is ``completed``, ``collision`` or ``diverged``.
    """

    scenario: str
    seed: int
    n: int
    dt: float
    times: list[float] = field(default_factory=list)
    positions: list[NDArray[np.float64]] = field(default_factory=list)
    velocities: list[NDArray[np.float64]] = field(default_factory=list)
    formation_error: list[float] = field(default_factory=list)
    side_errors: list[NDArray[np.float64]] = field(default_factory=list)
    p_bar: list[float] = field(default_factory=list)
    min_distance: list[float] = field(default_factory=list)
    center_error: list[float] = field(default_factory=list)
    control_norm: list[float] = field(default_factory=list)
    delta_z: list[float] = field(default_factory=list)
    disturbance_norm: list[float] = field(default_factory=list)
    events: list[Event] = field(default_factory=list)
    status: str = "completed"
    steps: int = 0
    d_max: float = 0.0
    order: list[int] = field(default_factory=list)

    @property
    def final_positions(self) -> NDArray[np.float64]:
        return self.positions[-1]

    @property
    def initial_positions(self) -> NDArray[np.float64]:
        return self.positions[0]

    def series(self, name: str) -> NDArray[np.float64]:
        """Return a logged series as an array."""
        return np.asarray(getattr(self, name), dtype=float)

    def event(
        self, kind: str, t: float, step: int, message: str = "", **data: Any
    ) -> None:
        self.events.append(Event(kind, float(t), int(step), message, data))


@dataclass
class LagSchedule:
    """
    Window bookkeeping for the lagged shared quantities.

    Attributes:
        steps_per_window: Integration steps per lag window tau
    """

    steps_per_window: int
    samples: list[Any] = field(default_factory=list)

    @classmethod
    def for_step(cls, tau: float, dt: float) -> LagSchedule:
        ratio = tau / dt
        steps = int(round(ratio))
        if steps < 1 or abs(steps - ratio) > 1e-6 * ratio:
            raise ParameterError(f"tau={tau} is not a whole number of steps of {dt}")
        return cls(steps)

    def is_boundary(self, step: int) -> bool:
        return step % self.steps_per_window == 0

    def window(self, step: int) -> int:
        return step // self.steps_per_window

    def record(self, value: Any) -> Any:
        """Store the sample of the window just started; return the held value."""
        self.samples.append(value)
        return self.samples[max(len(self.samples) - 2, 0)]


# =========================================================================
# Initial conditions
# =========================================================================


def streams(seed: int) -> tuple[Generator, Generator]:
    """Independent generators for initial placement and disturbances."""
    init_ss, dist_ss = SeedSequence(seed).spawn(2)
    return np.random.default_rng(init_ss), np.random.default_rng(dist_ss)


def _ball_point(rng: Generator, center: NDArray, radius: float) -> NDArray:
    direction = rng.standard_normal(3)
    direction /= np.linalg.norm(direction)
    return center + radius * rng.uniform() ** (1.0 / 3.0) * direction


def initial_positions(model: FormationModel, rng: Generator) -> NDArray[np.float64]:
    """
    Place the robots as the scenario's ``initial`` section describes.

    Raises:
        ParameterError: If the positions do not match the robot count, the
            template is unavailable, or the separation cannot be met
    """
    s = model.scenario
    init = s.initial
    n = model.n
    if init.kind == "positions":
        assert init.positions_m is not None
        pos = np.asarray(init.positions_m, dtype=float)
        if pos.shape != (n, 3):
            raise ParameterError(f"expected {n} initial positions, got {len(pos)}")
        return pos

    if init.center_m is not None:
        center = np.asarray(init.center_m, dtype=float)
    elif s.center is not None:
        center = np.asarray(s.center.x_c_m, dtype=float)
    else:
        center = np.zeros(3)

    if init.kind == "template":
        if model.template is None:
            raise ParameterError(
                "template placement needs a polygon or a library shape"
            )
        base = model.template - model.template.mean(axis=0)
        jitter = rng.uniform(-init.jitter_m, init.jitter_m, size=(n, 3))
        return center + init.scale * base + jitter

    if init.min_separation_m is not None:
        separation = init.min_separation_m
    elif s.collision is not None:
        separation = s.collision.r2_m
    else:
        separation = 0.0
    placed: list[NDArray] = []
    for i in range(n):
        for _ in range(MAX_PLACEMENT_ATTEMPTS):
            point = _ball_point(rng, center, init.radius_m)
            if all(np.linalg.norm(point - q) > separation for q in placed):
                placed.append(point)
                break
        else:
            raise ParameterError(
                f"could not place robot {i} at least {separation} m from the others "
                f"inside a ball of radius {init.radius_m} m"
            )
    return np.asarray(placed)


# =========================================================================
# Run
# =========================================================================


def run(
    scenario: Scenario,
    model: FormationModel | None = None,
    positions: NDArray[np.float64] | None = None,
) -> TrajectoryLog:
    """
    Integrate a scenario from t = 0 to ``sim.t_end_s``.

    A collision (d <= r1) or a non-finite state stops the run; the partial
    log is returned with ``status`` set accordingly.

    Args:
        scenario: Validated scenario
        model: Prebuilt model, built from the scenario when omitted
        positions: Override of the initial positions (n, 3)
    """
    model = model or FormationModel.from_scenario(scenario)
    init_rng, dist_rng = streams(scenario.seed)
    x_init = initial_positions(model, init_rng) if positions is None else positions
    x_init = np.asarray(x_init, dtype=float).reshape(model.n, 3)

    log = TrajectoryLog(scenario.name, scenario.seed, model.n, scenario.dt)
    log.order = list(range(model.n))
    if model.is_polygon and scenario.initial.assign_indices:
        assignment = assign_indices(x_init, model.plane_rotation)
        x_init = assignment.apply(x_init)
        log.order = assignment.order.tolist()
        if assignment.tie_broken:
            log.event("index_tie", 0.0, 0, "angle tie broken by original index")

    logger.info(
        "run %s: %d robots, seed %d, dt %g, t_end %g, %s",
        scenario.name,
        model.n,
        scenario.seed,
        scenario.dt,
        scenario.sim.t_end_s,
        scenario.vehicle.model,
    )
    if scenario.vehicle.model == "quadcopter":
        _run_quadcopters(model, x_init, dist_rng, log)
    else:
        _run_point_masses(model, x_init, dist_rng, log)
    logger.info(
        "run %s finished: %s after %d steps", scenario.name, log.status, log.steps
    )
    return log


def _step_count(scenario: Scenario) -> int:
    steps = int(round(scenario.sim.t_end_s / scenario.dt))
    return max(steps, 1)


def _log_every(scenario: Scenario) -> int:
    return max(1, int(round(scenario.sim.log_interval_s / scenario.dt)))


def _lag_schedule(scenario: Scenario, steps: int) -> LagSchedule:
    """Lag windows of the scenario; a single window when nothing is lagged."""
    if not scenario.lag_active:
        return LagSchedule(steps + 1)
    return LagSchedule.for_step(scenario.lag.tau_s, scenario.dt)


def _record(
    log: TrajectoryLog,
    model: FormationModel,
    t: float,
    pos: NDArray[np.float64],
    vel: NDArray[np.float64],
    control: NDArray[np.float64],
) -> None:
    x = pos.reshape(-1)
    log.times.append(float(t))
    log.positions.append(pos.copy())
    log.velocities.append(vel.copy())
    log.formation_error.append(model.formation_error(x))
    log.side_errors.append(model.side_errors(x))
    log.p_bar.append(model.p_bar(x))
    log.min_distance.append(min_pairwise_distance(pos))
    log.center_error.append(model.center_error(x))
    log.control_norm.append(float(np.linalg.norm(control)))


def _halt_event(log: TrajectoryLog, exc: Exception, t: float, step: int) -> None:
    if isinstance(exc, CollisionError):
        log.status = "collision"
        log.event(
            "collision", t, step, str(exc), pairs=exc.pairs, distance=exc.min_distance
        )
        logger.warning("run %s stopped at t=%.4g: %s", log.scenario, t, exc)
    else:
        log.status = "diverged"
        log.event("divergence", t, step, str(exc))
        logger.warning("run %s diverged at t=%.4g: %s", log.scenario, t, exc)


def _check_finite(y: NDArray[np.float64], t: float) -> None:
    if not np.all(np.isfinite(y)):
        raise DivergenceError(f"non-finite state at t={t:.6g}")


def _run_point_masses(
    model: FormationModel,
    x_init: NDArray[np.float64],
    dist_rng: Generator,
    log: TrajectoryLog,
) -> None:
    s = model.scenario
    n, dt = model.n, s.dt
    dim = 3 * n
    twin = model.disturbance is not None
    steps, every = _step_count(s), _log_every(s)
    lag = _lag_schedule(s, steps)
    lag_nominal = LagSchedule(lag.steps_per_window)
    step_fn = get_stepper(s.sim.integrator)
    v_max = s.vehicle.v_max_mps
    vbar = model.cm.Vbar

    x0 = x_init.reshape(-1)
    y = np.concatenate([x0, x0]) if twin else x0.copy()
    hold: tuple[float, NDArray] = (0.0, np.zeros(3))
    hold_nominal = hold
    offsets: NDArray[np.float64] | None = None
    velocity = np.zeros(dim)
    d = 0.0

    def velocity_of(
        x: NDArray, held: tuple[float, NDArray], noise: NDArray | None
    ) -> NDArray:
        u = model.formation_velocity(x, held[0], held[1], noise, velocity)
        if v_max is None:
            return u
        return saturate_velocity(u.reshape(-1, 3), v_max).reshape(-1)

    def derivative(_t: float, state: NDArray) -> NDArray:
        if not twin:
            return velocity_of(state, hold, None)
        return np.concatenate(
            [
                velocity_of(state[:dim], hold, offsets),
                velocity_of(state[dim:], hold_nominal, None),
            ]
        )

    step = 0
    try:
        for step in range(steps + 1):
            t = step * dt
            x = y[:dim]
            if lag.is_boundary(step):
                hold = lag.record((model.p_bar(x), geometric_center(x)))
                if twin:
                    xn = y[dim:]
                    sample = (model.p_bar(xn), geometric_center(xn))
                    hold_nominal = lag_nominal.record(sample)
                    assert model.disturbance is not None
                    offsets = model.disturbance.sample(dist_rng, n)
                window = lag.window(step)
                if window > 0:
                    log.event("window", t, step, p_bar=float(hold[0]))
                logger.debug("window %d at t=%.4g: p_bar %.6g", window, t, hold[0])
            if model.collision is not None:
                check_collisions(x, model.collision.r1)
            velocity = velocity_of(x, hold, offsets)
            if twin:
                nominal = velocity_of(x, hold_nominal, None)
                d = float(np.linalg.norm(vbar @ (velocity - nominal)))
                log.d_max = max(log.d_max, d)
            if step % every == 0 or step == steps:
                pos = x.reshape(n, 3)
                _record(log, model, t, pos, velocity.reshape(n, 3), velocity)
                if twin:
                    log.disturbance_norm.append(d)
                    log.delta_z.append(float(np.linalg.norm(vbar @ (x - y[dim:]))))
            if step == steps:
                break
            y = step_fn(derivative, t, y, dt)
            _check_finite(y, t + dt)
            log.steps = step + 1
    except (CollisionError, DivergenceError) as exc:
        t = step * dt
        _halt_event(log, exc, t, step)
        x = y[:dim]
        if np.all(np.isfinite(y)) and (not log.times or log.times[-1] < t):
            _record(log, model, t, x.reshape(n, 3), np.zeros((n, 3)), np.zeros(dim))
            if twin:
                log.disturbance_norm.append(log.d_max)
                log.delta_z.append(float(np.linalg.norm(vbar @ (x - y[dim:]))))


def _held_swarm(
    n: int, thrust: NDArray, moment: NDArray, params: QuadParams
) -> Callable[[float, NDArray], NDArray]:
    """Swarm dynamics with thrust and moments held over one step."""

    def derivative(_t: float, flat: NDArray) -> NDArray:
        states = flat.reshape(n, STATE_DIM)
        return swarm_derivative(states, thrust, moment, params).reshape(-1)

    return derivative


def _run_quadcopters(
    model: FormationModel,
    x_init: NDArray[np.float64],
    dist_rng: Generator,
    log: TrajectoryLog,
) -> None:
    s = model.scenario
    n, dt = model.n, s.dt
    steps, every = _step_count(s), _log_every(s)
    lag = _lag_schedule(s, steps)
    step_fn = get_stepper(s.sim.integrator)
    params = model.quad_params()
    gains = model.tracker_gains()
    tracker = VelocityTracker(gains, params, n)

    states = np.vstack([QuadState.hover(p, gains.yaw).to_array() for p in x_init])
    hold: tuple[float, NDArray] = (0.0, geometric_center(x_init))
    offsets: NDArray[np.float64] | None = None
    command = np.zeros(3 * n)

    def layer(pos: NDArray, vel: NDArray) -> NDArray:
        nonlocal command
        command = model.formation_velocity(
            pos.reshape(-1), hold[0], hold[1], offsets, vel.reshape(-1)
        )
        return command

    layers: list[Callable[[NDArray, NDArray], NDArray]] = [layer]
    saturated = np.zeros(n, dtype=bool)
    limited = np.zeros(n, dtype=bool)
    v_max = gains.v_max
    step = 0
    try:
        for step in range(steps + 1):
            t = step * dt
            pos = states[:, POS]
            if lag.is_boundary(step):
                x = pos.reshape(-1)
                hold = lag.record((model.p_bar(x), geometric_center(x)))
                if model.disturbance is not None:
                    offsets = model.disturbance.sample(dist_rng, n)
                window = lag.window(step)
                if window > 0:
                    log.event("window", t, step, p_bar=float(hold[0]))
                logger.debug("window %d at t=%.4g: p_bar %.6g", window, t, hold[0])
            if model.collision is not None:
                check_collisions(pos, model.collision.r1)
            commands = hierarchy_step(states, layers, tracker, dt)
            flags = np.array([c.saturated for c in commands])
            if np.any(flags & ~saturated):
                log.event(
                    "saturation",
                    t,
                    step,
                    "tracker saturated",
                    vehicles=np.flatnonzero(flags & ~saturated).tolist(),
                )
            saturated = flags
            over = np.linalg.norm(command.reshape(n, 3), axis=1) > v_max
            if np.any(over & ~limited):
                log.event(
                    "speed_limit",
                    t,
                    step,
                    "velocity command capped",
                    vehicles=np.flatnonzero(over & ~limited).tolist(),
                )
            limited = over
            if step % every == 0 or step == steps:
                _record(log, model, t, pos.copy(), states[:, VEL].copy(), command)
            if step == steps:
                break
            thrust = np.array([c.thrust for c in commands])
            moment = np.array([c.moment for c in commands])
            derivative = _held_swarm(n, thrust, moment, params)
            flat = step_fn(derivative, t, states.reshape(-1), dt)
            _check_finite(flat, t + dt)
            states = normalize_attitudes(flat.reshape(n, STATE_DIM))
            log.steps = step + 1
    except (CollisionError, DivergenceError) as exc:
        t = step * dt
        _halt_event(log, exc, t, step)
        if np.all(np.isfinite(states)) and (not log.times or log.times[-1] < t):
            pos, vel = states[:, POS].copy(), states[:, VEL].copy()
            _record(log, model, t, pos, vel, command)
    if log.status == "completed":
        drift = np.abs(np.linalg.norm(states[:, ATT], axis=1) - 1.0).max()
        logger.debug("max quaternion norm drift %.3g", drift)
