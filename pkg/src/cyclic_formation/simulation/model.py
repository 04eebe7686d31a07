"""
Formation model: the controllers and constraints a scenario describes.

``FormationModel.from_scenario`` resolves the formation (polygon or minimal
PPS of a polyhedron), builds the constraint matrix and the controller
parameters, and wires the optional size, center, collision and disturbance
extensions. The engine only talks to ``formation_velocity``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from cyclic_formation.core.cyclic import (
    CyclicParams,
    InternalDynamics,
    assemble_L,
    contraction_rate,
    cyclic_control,
    theorem4_margin,
)
from cyclic_formation.core.linalg import plane_rotation
from cyclic_formation.core.polyhedron import (
    Development,
    Face,
    MinimalPPS,
    Rule,
    build_reduced_V,
    extract_minimal_pps,
    face_params,
    polyhedron_control,
    polyhedron_laplacian,
    theorem7_certify,
)
from cyclic_formation.core.report import CertificationReport
from cyclic_formation.core.subspace import (
    ConstraintMatrix,
    PolygonSpec,
    build_polygon_V,
    formation_error,
    regular_polygon,
)
from cyclic_formation.extensions.center import (
    CenterParams,
    center_certify,
    center_control,
    center_error,
    geometric_center,
)
from cyclic_formation.extensions.collision import (
    CollisionParams,
    collision_control,
)
from cyclic_formation.extensions.robustness import (
    AngleDisturbance,
    RobustnessModel,
    steady_state_bound,
)
from cyclic_formation.extensions.size import (
    SizeParams,
    inter_robot_errors,
    polyhedron_size_control,
    size_cyclic_control,
    size_lag_certify,
    theorem5_certify,
)
from cyclic_formation.simulation.scenario import Scenario
from cyclic_formation.simulation.shapes import build_shape
from cyclic_formation.vehicles.quadcopter import QuadParams, TrackerGains

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class FormationModel:
    """
    Resolved controllers for one scenario.

    Attributes:
        scenario: Source scenario
        n: Robot count
        cm: Constraint matrix of the target formation
        params: One CyclicParams (polygon) or one per PPS face
        pps: Minimal PPS, None for polygons
        template: Reference positions (n, 3) of the target shape, if known
        size_order: Robots whose consecutive distances define p̄
        plane_rotation: R_eta of the polygon (or of PPS face 1)
    """

    scenario: Scenario
    n: int
    cm: ConstraintMatrix
    params: list[CyclicParams]
    pps: MinimalPPS | None
    template: NDArray[np.float64] | None
    size_order: list[int]
    plane_rotation: NDArray[np.float64]
    size: SizeParams | None = None
    center: CenterParams | None = None
    collision: CollisionParams | None = None
    disturbance: AngleDisturbance | None = None

    @classmethod
    def from_scenario(cls, scenario: Scenario) -> FormationModel:
        """
        Raises:
            ParameterError: On controller parameters the scenario schema allows
                but the theory does not (for example N >= n - 1)
            StructuralError: On an invalid development or rank-deficient PPS
        """
        f = scenario.formation
        c = scenario.controller
        tau = scenario.lag.tau_s
        angles = (
            None if c.angles_deg is None else tuple(np.deg2rad(a) for a in c.angles_deg)
        )
        side = scenario.size.rho_m if scenario.size is not None else f.side_m

        if f.kind == "polygon":
            assert f.n is not None
            r_eta = plane_rotation(f.plane_normal)
            params = [
                CyclicParams(
                    f.n,
                    c.horizon,
                    c.gains,
                    angles,
                    r_eta,
                    allow_zero=c.allow_zero_gains,
                )
            ]
            cm = build_polygon_V(PolygonSpec(f.n, r_eta))
            pps = None
            n = f.n
            template = regular_polygon(n, side, plane_rotation=r_eta).reshape(n, 3)
            order = list(range(n))
        else:
            template = None
            if f.shape is not None:
                shape = build_shape(f.shape, side)
                development = shape.development
                template = shape.vertices
            else:
                assert f.faces is not None and f.rules is not None
                development = Development(
                    tuple(Face(face.vertices, normal=face.normal) for face in f.faces),
                    tuple(Rule(r.faces[0], r.faces[1], r.edge) for r in f.rules),
                )
            pps = extract_minimal_pps(development, f.root_face)
            params = face_params(
                pps, c.horizon, c.gains, allow_zero=c.allow_zero_gains
            )
            cm = build_reduced_V(pps)
            n = pps.n
            r_eta = pps.faces[0].normal_rotation
            order = list(pps.faces[0].cyclic_order)

        size = None
        if scenario.size is not None:
            size = SizeParams(
                rho=scenario.size.rho_m,
                alpha_s0=float(np.deg2rad(scenario.size.alpha_s0_deg)),
                fs=scenario.size.shaping,
                tau=tau,
            )
        center = None
        if scenario.center is not None:
            center = CenterParams(scenario.center.x_c_m, scenario.center.k_c, tau)
        collision = None
        if scenario.collision is not None:
            collision = CollisionParams(
                r1=scenario.collision.r1_m,
                r2=scenario.collision.r2_m,
                variant=scenario.collision.variant,
                k_coll=scenario.collision.k_coll,
                rho=side,
            )
        disturbance = None
        if scenario.disturbance is not None:
            d = scenario.disturbance
            disturbance = AngleDisturbance.from_degrees(
                d.angle_low_deg, d.angle_high_deg, d.d_bar
            )
        logger.debug(
            "model %s: %d robots, %d constraint rows", scenario.name, n, cm.rank
        )
        return cls(
            scenario=scenario,
            n=n,
            cm=cm,
            params=params,
            pps=pps,
            template=template,
            size_order=order,
            plane_rotation=r_eta,
            size=size,
            center=center,
            collision=collision,
            disturbance=disturbance,
        )

    # ------------------------------------------------------------------
    # Structure
    # ------------------------------------------------------------------

    @property
    def is_polygon(self) -> bool:
        return self.pps is None

    @property
    def dynamics(self) -> InternalDynamics:
        return InternalDynamics(jacobian_sup=self.scenario.controller.jacobian_sup)

    def laplacian(self) -> NDArray[np.float64]:
        """Dense closed-loop matrix of the nominal law u = -L x."""
        if self.pps is None:
            return assemble_L(self.params[0])
        return polyhedron_laplacian(self.params, self.pps, self.n)

    def quad_params(self) -> QuadParams:
        v = self.scenario.vehicle
        return QuadParams(
            mass=v.mass_kg, inertia=np.diag(v.inertia_diag_kgm2), gravity=v.gravity_mps2
        )

    def tracker_gains(self) -> TrackerGains:
        v = self.scenario.vehicle
        t = v.tracker
        return TrackerGains(
            kp_v=t.kp_v,
            ki_v=t.ki_v,
            kd_v=t.kd_v,
            K_p=np.asarray(t.K_p_diag),
            K_d=np.asarray(t.K_d_diag),
            yaw=float(np.deg2rad(t.yaw_deg)),
            v_max=3.0 if v.v_max_mps is None else v.v_max_mps,
            max_tilt=float(np.deg2rad(t.max_tilt_deg)),
        )

    # ------------------------------------------------------------------
    # Measurements
    # ------------------------------------------------------------------

    def p_bar(self, x: ArrayLike) -> float:
        """Mean relative side error over ``size_order``; 0 without size control."""
        if self.size is None:
            return 0.0
        return inter_robot_errors(x, self.size.rho, self.size_order)[1]

    def side_errors(self, x: ArrayLike) -> NDArray[np.float64]:
        if self.size is None:
            return np.zeros(len(self.size_order))
        return inter_robot_errors(x, self.size.rho, self.size_order)[0]

    def formation_error(self, x: ArrayLike) -> float:
        return formation_error(self.cm, x)

    def center_error(self, x: ArrayLike) -> float:
        if self.center is None:
            return 0.0
        return center_error(x, self.center)

    # ------------------------------------------------------------------
    # Control
    # ------------------------------------------------------------------

    def shape_velocity(
        self,
        x: ArrayLike,
        p_bar_delayed: float = 0.0,
        angle_offsets: ArrayLike | None = None,
    ) -> NDArray[np.float64]:
        """Cyclic (or size-controlled cyclic) part of the formation velocity."""
        if self.pps is None:
            if self.size is not None:
                return size_cyclic_control(
                    x, self.params[0], self.size, p_bar_delayed, angle_offsets
                )
            return cyclic_control(x, self.params[0], angle_offsets=angle_offsets)
        if self.size is not None:
            return polyhedron_size_control(
                x, self.params, self.pps, self.size, p_bar_delayed, angle_offsets
            )
        return polyhedron_control(x, self.params, self.pps, angle_offsets=angle_offsets)

    def formation_velocity(
        self,
        x: ArrayLike,
        p_bar_delayed: float = 0.0,
        x0_delayed: ArrayLike | None = None,
        angle_offsets: ArrayLike | None = None,
        velocities: ArrayLike | None = None,
    ) -> NDArray[np.float64]:
        """
        Full formation-layer velocity command.

        Raises:
            CollisionError: If any pair of robots is within r1
        """
        state = np.asarray(x, dtype=float).reshape(-1)
        u = self.shape_velocity(state, p_bar_delayed, angle_offsets)
        if self.center is not None:
            x0 = geometric_center(state) if x0_delayed is None else x0_delayed
            u = u + center_control(state, self.center, x0)
        if self.collision is not None:
            u = u + collision_control(state, self.collision, velocities)
        return u

    # ------------------------------------------------------------------
    # Certification
    # ------------------------------------------------------------------

    def certify(self) -> CertificationReport:
        """Run every check that applies to this scenario."""
        report = CertificationReport()
        if self.pps is not None:
            report.add(theorem7_certify(self.cm, self.pps, self.params))
        if self.size is not None:
            report.add(theorem5_certify(self.params[0], self.size, self.dynamics))
            lag = report.add(size_lag_certify(self.params[0], self.size))
            report.tau_bound = lag.details["tau_bound"]
        elif self.pps is None:
            report.add(theorem4_margin(self.params[0], self.dynamics))
        if self.center is not None:
            report.add(center_certify(self.center))

        rate = contraction_rate(self.cm, self.laplacian())
        report.contraction_rate = rate
        if self.disturbance is not None:
            if self.disturbance.d_bar is not None and rate > 0.0:
                rm = RobustnessModel(-rate, self.disturbance.d_bar)
                report.steady_state_bound = steady_state_bound(rm)
                report.notes.append(
                    "disturbed trajectories stay within "
                    "(d_bar / |Lambda|)(1 - exp(-|Lambda| t)) of the nominal one"
                )
            else:
                report.notes.append(
                    "no d_bar given; the steady-state bound is checked after a run"
                )
        if self.collision is not None:
            report.notes.append(
                "collision avoidance is not certified; runs stop on the first d <= r1"
            )
        if report.passed:
            logger.info("scenario %s certified (rate %.6g)", self.scenario.name, rate)
        else:
            logger.info("scenario %s not certified", self.scenario.name)
        return report
