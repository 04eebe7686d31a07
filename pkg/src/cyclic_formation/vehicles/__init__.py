"""Vehicle models that consume formation-layer velocity commands."""

from cyclic_formation.vehicles.quadcopter import (
    QuadParams,
    QuadState,
    ThrustMoment,
    TrackerGains,
    VelocityTracker,
    hierarchy_step,
    quad_derivative,
    saturate_velocity,
    swarm_derivative,
    velocity_tracker,
)

__all__ = [
    "QuadParams",
    "QuadState",
    "ThrustMoment",
    "TrackerGains",
    "VelocityTracker",
    "hierarchy_step",
    "quad_derivative",
    "saturate_velocity",
    "swarm_derivative",
    "velocity_tracker",
]
