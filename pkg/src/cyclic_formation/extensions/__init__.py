"""
Extensions to the fixed-size cyclic controller.

- size: lag-window size control, its constants and certification
- center: geometric-center control
- collision: repulsive-potential collision avoidance
- robustness: disturbance bounds
"""

from cyclic_formation.extensions.center import (
    CenterParams,
    center_certify,
    center_control,
    center_error,
    geometric_center,
)
from cyclic_formation.extensions.collision import (
    CollisionParams,
    CollisionVariant,
    check_collisions,
    collision_control,
    min_pairwise_distance,
    rpf_force,
    rpf_value,
)
from cyclic_formation.extensions.robustness import (
    AngleDisturbance,
    RobustnessModel,
    disturbance_norm,
    robustness_bound,
    robustness_ode_bound,
    steady_state_bound,
)
from cyclic_formation.extensions.size import (
    SharedEdge,
    SizeConstants,
    SizeParams,
    inter_robot_errors,
    polyhedron_size_control,
    rotational_q1_control,
    shared_edge,
    size_constants,
    size_cyclic_control,
    size_lag_certify,
    size_recursion,
    tau_bound,
    theorem5_certify,
)

__all__ = [
    "AngleDisturbance",
    "CenterParams",
    "CollisionParams",
    "CollisionVariant",
    "RobustnessModel",
    "SharedEdge",
    "SizeConstants",
    "SizeParams",
    "center_certify",
    "center_control",
    "center_error",
    "check_collisions",
    "collision_control",
    "disturbance_norm",
    "geometric_center",
    "inter_robot_errors",
    "min_pairwise_distance",
    "polyhedron_size_control",
    "robustness_bound",
    "robustness_ode_bound",
    "rotational_q1_control",
    "rpf_force",
    "rpf_value",
    "shared_edge",
    "size_constants",
    "size_cyclic_control",
    "size_lag_certify",
    "size_recursion",
    "steady_state_bound",
    "tau_bound",
    "theorem5_certify",
]
