"""
Test-data helpers for formation control.

Provides factory_boy factories for controller parameters and scenarios.
"""

from cyclic_formation.utils.factories import (
    CenterParamsFactory,
    CenterSpecFactory,
    CollisionParamsFactory,
    ControllerSpecFactory,
    CyclicParamsFactory,
    FormationSpecFactory,
    InitialSpecFactory,
    QuadParamsFactory,
    ScenarioFactory,
    SimSpecFactory,
    SizeParamsFactory,
    SizeSpecFactory,
    TrackerGainsFactory,
)

__all__ = [
    "CenterParamsFactory",
    "CenterSpecFactory",
    "CollisionParamsFactory",
    "ControllerSpecFactory",
    "CyclicParamsFactory",
    "FormationSpecFactory",
    "InitialSpecFactory",
    "QuadParamsFactory",
    "ScenarioFactory",
    "SimSpecFactory",
    "SizeParamsFactory",
    "SizeSpecFactory",
    "TrackerGainsFactory",
]
