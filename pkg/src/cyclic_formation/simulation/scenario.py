"""
Scenario documents.

A scenario is a JSON object whose sections map onto the dataclasses below.
Physical quantities carry their unit in the key name (``rho_m``, ``tau_s``).
Unknown keys are rejected with their dotted path, and emission is canonical:
fields in declaration order, ``None`` omitted, two-space indent, trailing
newline. Emitting a parsed document and parsing it again is byte-stable.

Example:
    scenario = load_scenario("hexagon")
    scenario.formation.n     # 6
    text = emit_scenario(scenario)
"""

from __future__ import annotations

import dataclasses
import json
import os
import re
import types
import typing
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import TYPE_CHECKING, Any, Union

from cyclic_formation.exceptions import ScenarioError

if TYPE_CHECKING:
    from importlib.abc import Traversable

OUTPUT_DIR_ENV = "CYCLIC_FORMATION_OUTPUT_DIR"
DEFAULT_OUTPUT_DIR = "formation-output"

Vec3 = tuple[float, float, float]

FORMATION_KINDS = ("polygon", "polyhedron")
VEHICLE_MODELS = ("point_mass", "quadcopter")
INITIAL_KINDS = ("positions", "random_ball", "template")
COLLISION_VARIANTS = ("hard", "los", "tanh")
SHAPINGS = ("tanh", "saturation")
INTEGRATORS = ("rk4", "euler")


# =========================================================================
# Sections
# =========================================================================


@dataclass
class FaceSpec:
    """Explicit face: robot ids counterclockwise about the outward normal."""

    vertices: list[int]
    normal: Vec3


@dataclass
class RuleSpec:
    faces: tuple[int, int]
    edge: tuple[int, int]


@dataclass
class FormationSpec:
    kind: str = "polygon"
    n: int | None = None
    plane_normal: Vec3 = (0.0, 0.0, 1.0)
    shape: str | None = None
    side_m: float = 1.0
    faces: list[FaceSpec] | None = None
    rules: list[RuleSpec] | None = None
    root_face: int = 0


@dataclass
class ControllerSpec:
    horizon: int = 1
    gains: tuple[float, ...] = (1.0,)
    angles_deg: tuple[float, ...] | None = None
    jacobian_sup: float = 0.0
    allow_zero_gains: bool = False


@dataclass
class SizeSpec:
    rho_m: float = 1.0
    alpha_s0_deg: float = 5.0
    shaping: str = "tanh"


@dataclass
class CenterSpec:
    x_c_m: Vec3 = (0.0, 0.0, 0.0)
    k_c: float = 0.5


@dataclass
class LagSpec:
    tau_s: float = 0.1


@dataclass
class CollisionSpec:
    variant: str = "hard"
    r1_m: float = 0.4
    r2_m: float = 1.2
    k_coll: float = 1.0


@dataclass
class DisturbanceSpec:
    """Uniform per-robot rotation-angle error, resampled every lag window."""

    angle_low_deg: float = -1.0
    angle_high_deg: float = 1.0
    d_bar: float | None = None


@dataclass
class TrackerSpec:
    kp_v: Vec3 = (2.0, 2.0, 3.0)
    ki_v: Vec3 = (0.3, 0.3, 0.5)
    kd_v: Vec3 = (0.0, 0.0, 0.0)
    K_p_diag: Vec3 = (1.85, 1.85, 0.95)
    K_d_diag: Vec3 = (0.22, 0.22, 0.21)
    yaw_deg: float = 0.0
    max_tilt_deg: float = 35.0


@dataclass
class VehicleSpec:
    model: str = "point_mass"
    v_max_mps: float | None = None
    mass_kg: float = 1.0
    inertia_diag_kgm2: Vec3 = (0.0082, 0.0082, 0.0149)
    gravity_mps2: float = 9.81
    tracker: TrackerSpec = field(default_factory=TrackerSpec)


@dataclass
class InitialSpec:
    """
    Initial robot positions.

    ``positions`` lists them explicitly; ``random_ball`` samples uniformly in
    a ball about ``center_m`` (default: the desired center, else the origin);
    ``template`` places the target shape scaled by ``scale`` with uniform
    ``jitter_m`` noise.
    """

    kind: str = "random_ball"
    positions_m: list[Vec3] | None = None
    center_m: Vec3 | None = None
    radius_m: float = 1.0
    min_separation_m: float | None = None
    scale: float = 1.0
    jitter_m: float = 0.0
    assign_indices: bool = True


@dataclass
class SimSpec:
    t_end_s: float = 10.0
    dt_s: float | None = None
    integrator: str = "rk4"
    log_interval_s: float = 0.01


@dataclass
class ConvergenceSpec:
    formation_rel_tol: float = 1e-6
    side_rel_tol: float = 0.005
    center_tol_m: float = 0.05


@dataclass
class MonteCarloSpec:
    samples: int = 100
    radius_m: float = 5.0
    workers: int = 1


@dataclass
class Scenario:
    """A complete experiment description."""

    name: str
    description: str = ""
    tag: str = ""
    seed: int = 0
    formation: FormationSpec = field(default_factory=FormationSpec)
    controller: ControllerSpec = field(default_factory=ControllerSpec)
    size: SizeSpec | None = None
    center: CenterSpec | None = None
    lag: LagSpec = field(default_factory=LagSpec)
    collision: CollisionSpec | None = None
    disturbance: DisturbanceSpec | None = None
    vehicle: VehicleSpec = field(default_factory=VehicleSpec)
    initial: InitialSpec = field(default_factory=InitialSpec)
    sim: SimSpec = field(default_factory=SimSpec)
    convergence: ConvergenceSpec = field(default_factory=ConvergenceSpec)
    monte_carlo: MonteCarloSpec = field(default_factory=MonteCarloSpec)

    @property
    def dt(self) -> float:
        """Integration step; defaults to min(1 ms, tau / 100)."""
        if self.sim.dt_s is not None:
            return self.sim.dt_s
        return min(1e-3, self.lag.tau_s / 100.0)

    @property
    def lag_active(self) -> bool:
        return (
            self.size is not None
            or self.center is not None
            or self.disturbance is not None
        )

    def with_overrides(
        self,
        seed: int | None = None,
        dt: float | None = None,
        t_end: float | None = None,
        samples: int | None = None,
        workers: int | None = None,
    ) -> Scenario:
        """Copy with command-line overrides applied and re-validated."""
        sim = dataclasses.replace(
            self.sim,
            dt_s=self.sim.dt_s if dt is None else dt,
            t_end_s=self.sim.t_end_s if t_end is None else t_end,
        )
        mc = dataclasses.replace(
            self.monte_carlo,
            samples=self.monte_carlo.samples if samples is None else samples,
            workers=self.monte_carlo.workers if workers is None else workers,
        )
        out = dataclasses.replace(
            self, seed=self.seed if seed is None else seed, sim=sim, monte_carlo=mc
        )
        validate_scenario(out)
        return out


# =========================================================================
# Validation
# =========================================================================


def _fail(path: str, message: str) -> ScenarioError:
    return ScenarioError(f"{path}: {message}")


def _positive(value: float | None, path: str) -> None:
    if value is not None and not value > 0.0:
        raise _fail(path, f"must be positive, got {value}")


def _choice(value: str, choices: tuple[str, ...], path: str) -> None:
    if value not in choices:
        raise _fail(path, f"must be one of {list(choices)}, got {value!r}")


def validate_scenario(s: Scenario) -> None:
    """
    Check cross-field constraints of a scenario.

    Raises:
        ScenarioError: Naming the offending dotted key
    """
    from cyclic_formation.simulation.shapes import SHAPES

    f = s.formation
    _choice(f.kind, FORMATION_KINDS, "formation.kind")
    if f.kind == "polygon":
        if f.n is None or f.n < 3:
            raise _fail("formation.n", "a polygon needs n >= 3")
        if not any(f.plane_normal):
            raise _fail("formation.plane_normal", "must be non-zero")
    else:
        explicit = f.faces is not None or f.rules is not None
        if (f.shape is None) == (not explicit):
            raise _fail("formation", "give either 'shape' or 'faces' and 'rules'")
        if f.shape is not None and f.shape not in SHAPES:
            raise _fail("formation.shape", f"unknown shape {f.shape!r}")
        if explicit and (f.faces is None or f.rules is None):
            raise _fail("formation", "'faces' and 'rules' must be given together")
    _positive(f.side_m, "formation.side_m")

    c = s.controller
    if c.horizon < 1:
        raise _fail("controller.horizon", "must be >= 1")
    if len(c.gains) != c.horizon:
        raise _fail("controller.gains", f"expected {c.horizon} gains")
    if any(k < 0.0 for k in c.gains):
        raise _fail("controller.gains", "gains must be non-negative")
    if not c.allow_zero_gains and any(k == 0.0 for k in c.gains):
        raise _fail("controller.gains", "gains must be positive")
    if c.angles_deg is not None and len(c.angles_deg) != c.horizon:
        raise _fail("controller.angles_deg", f"expected {c.horizon} angles")

    if s.size is not None:
        _positive(s.size.rho_m, "size.rho_m")
        if s.size.alpha_s0_deg < 0.0:
            raise _fail("size.alpha_s0_deg", "must be non-negative")
        _choice(s.size.shaping, SHAPINGS, "size.shaping")
    if s.center is not None:
        _positive(s.center.k_c, "center.k_c")
    _positive(s.lag.tau_s, "lag.tau_s")
    if s.collision is not None:
        _choice(s.collision.variant, COLLISION_VARIANTS, "collision.variant")
        if not 0.0 < s.collision.r1_m < s.collision.r2_m:
            raise _fail("collision", "need 0 < r1_m < r2_m")
    if s.disturbance is not None:
        d = s.disturbance
        if d.angle_low_deg > d.angle_high_deg:
            raise _fail("disturbance", "angle_low_deg must not exceed angle_high_deg")
        if d.d_bar is not None and d.d_bar < 0.0:
            raise _fail("disturbance.d_bar", "must be non-negative")

    _choice(s.vehicle.model, VEHICLE_MODELS, "vehicle.model")
    _positive(s.vehicle.v_max_mps, "vehicle.v_max_mps")
    _positive(s.vehicle.mass_kg, "vehicle.mass_kg")

    i = s.initial
    _choice(i.kind, INITIAL_KINDS, "initial.kind")
    if i.kind == "positions":
        if not i.positions_m:
            raise _fail("initial.positions_m", "required when kind is 'positions'")
        if f.kind == "polygon" and len(i.positions_m) != f.n:
            raise _fail("initial.positions_m", f"expected {f.n} positions")
    if i.radius_m < 0.0:
        raise _fail("initial.radius_m", "must be non-negative")
    _positive(i.scale, "initial.scale")

    _positive(s.sim.t_end_s, "sim.t_end_s")
    _positive(s.sim.dt_s, "sim.dt_s")
    _choice(s.sim.integrator, INTEGRATORS, "sim.integrator")
    if s.sim.log_interval_s < s.dt:
        raise _fail("sim.log_interval_s", "must be at least the integration step")
    if s.lag_active:
        ratio = s.lag.tau_s / s.dt
        if ratio < 10.0 - 1e-9:
            raise _fail("sim.dt_s", "lag windows need dt <= tau / 10")
        if abs(ratio - round(ratio)) > 1e-6 * ratio:
            raise _fail("sim.dt_s", "tau must be a whole number of steps")

    if s.monte_carlo.samples < 1:
        raise _fail("monte_carlo.samples", "must be >= 1")
    if s.monte_carlo.radius_m < 0.0:
        raise _fail("monte_carlo.radius_m", "must be non-negative")
    if s.monte_carlo.workers < 1:
        raise _fail("monte_carlo.workers", "must be >= 1")


# =========================================================================
# Parsing
# =========================================================================


def _join(path: str, key: str | int) -> str:
    if isinstance(key, int):
        return f"{path}[{key}]"
    return f"{path}.{key}" if path else key


def _convert(tp: Any, value: Any, path: str) -> Any:
    origin = typing.get_origin(tp)
    args = typing.get_args(tp)

    if origin in (Union, types.UnionType):
        if value is None and type(None) in args:
            return None
        (inner,) = [a for a in args if a is not type(None)]
        return _convert(inner, value, path)
    if dataclasses.is_dataclass(tp):
        return _build(tp, value, path)
    if origin is list:
        if not isinstance(value, list):
            raise _fail(path, "expected an array")
        return [_convert(args[0], v, _join(path, i)) for i, v in enumerate(value)]
    if origin is tuple:
        if not isinstance(value, list):
            raise _fail(path, "expected an array")
        if len(args) == 2 and args[1] is Ellipsis:
            args = (args[0],) * len(value)
        elif len(value) != len(args):
            raise _fail(path, f"expected {len(args)} elements, got {len(value)}")
        return tuple(
            _convert(a, v, _join(path, i))
            for i, (a, v) in enumerate(zip(args, value, strict=True))
        )
    if tp is bool:
        if not isinstance(value, bool):
            raise _fail(path, "expected true or false")
        return value
    if tp is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise _fail(path, "expected an integer")
        return value
    if tp is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise _fail(path, "expected a number")
        return float(value)
    if tp is str:
        if not isinstance(value, str):
            raise _fail(path, "expected a string")
        return value
    raise TypeError(f"unsupported scenario field type {tp!r}")


def _build(cls: type, data: Any, path: str) -> Any:
    if not isinstance(data, dict):
        raise _fail(path or "<root>", "expected an object")
    names = [f.name for f in dataclasses.fields(cls)]
    unknown = sorted(set(data) - set(names))
    if unknown:
        raise _fail(_join(path, unknown[0]), "unknown key")
    hints = typing.get_type_hints(cls)
    kwargs = {}
    for f in dataclasses.fields(cls):
        where = _join(path, f.name)
        if f.name in data:
            kwargs[f.name] = _convert(hints[f.name], data[f.name], where)
        elif (
            f.default is dataclasses.MISSING
            and f.default_factory is dataclasses.MISSING
        ):
            raise _fail(where, "missing required key")
    return cls(**kwargs)


def _locate(text: str, dotted: str) -> tuple[int | None, int | None]:
    """Best-effort line and column of the last key in ``dotted``."""
    offset = 0
    found = None
    for key in re.findall(r"[A-Za-z_][A-Za-z0-9_]*", dotted):
        hit = text.find(f'"{key}"', offset)
        if hit < 0:
            break
        found = offset = hit
    if found is None:
        return None, None
    line = text.count("\n", 0, found) + 1
    column = found - (text.rfind("\n", 0, found) + 1) + 1
    return line, column


def scenario_from_dict(data: Any) -> Scenario:
    """Build and validate a Scenario from decoded JSON."""
    scenario = _build(Scenario, data, "")
    validate_scenario(scenario)
    return scenario


def parse_scenario(text: str, path: str | None = None) -> Scenario:
    """
    Parse a scenario document.

    Raises:
        ScenarioError: With path, line and column when they can be determined
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(exc.msg, path, exc.lineno, exc.colno) from None
    try:
        return scenario_from_dict(data)
    except ScenarioError as exc:
        dotted = exc.message.split(":", 1)[0]
        line, column = _locate(text, dotted)
        raise ScenarioError(exc.message, path, line, column) from None


# =========================================================================
# Emission
# =========================================================================


def _plain(value: Any) -> Any:
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {
            f.name: _plain(getattr(value, f.name))
            for f in dataclasses.fields(value)
            if getattr(value, f.name) is not None
        }
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def scenario_to_dict(scenario: Scenario) -> dict[str, Any]:
    return _plain(scenario)


def emit_scenario(scenario: Scenario) -> str:
    """Canonical JSON text for ``scenario``."""
    return json.dumps(scenario_to_dict(scenario), indent=2, ensure_ascii=False) + "\n"


# =========================================================================
# Files
# =========================================================================


def _scenario_root() -> Traversable:
    return resources.files("cyclic_formation.simulation") / "scenarios"


def bundled_scenarios() -> list[str]:
    """Names of the scenarios shipped with the package."""
    return sorted(
        entry.name[: -len(".json")]
        for entry in _scenario_root().iterdir()
        if entry.name.endswith(".json")
    )


def load_scenario(source: str | Path) -> Scenario:
    """
    Load a scenario from a file path or a bundled scenario name.

    Raises:
        ScenarioError: If the source does not exist or fails validation
    """
    path = Path(source)
    if path.is_file():
        return parse_scenario(path.read_text(encoding="utf-8"), str(path))
    name = str(source)
    if name in bundled_scenarios():
        entry = _scenario_root() / f"{name}.json"
        text = entry.read_text(encoding="utf-8")
        return parse_scenario(text, f"<bundled>/{name}.json")
    raise ScenarioError(
        f"no scenario file or bundled scenario named {name!r}", str(source)
    )


def default_output_dir() -> Path:
    """Directory from CYCLIC_FORMATION_OUTPUT_DIR, else ./formation-output."""
    return Path(os.environ.get(OUTPUT_DIR_ENV, DEFAULT_OUTPUT_DIR))
