"""
Factory Boy factories for formation test data.

These factories build controller parameters and complete scenarios with
small, fast defaults. Extend them in your own tests.

Example:
    from cyclic_formation.utils import ScenarioFactory

    scenario = ScenarioFactory(formation__n=5, seed=3)
    sized = ScenarioFactory(sized=True)

    class SlowHexagonFactory(ScenarioFactory):
        controller = factory.SubFactory(ControllerSpecFactory, gains=(0.2,))
"""

from __future__ import annotations

from typing import Any

import factory
import numpy as np

from cyclic_formation.core.cyclic import CyclicParams
from cyclic_formation.extensions.center import CenterParams
from cyclic_formation.extensions.collision import CollisionParams
from cyclic_formation.extensions.size import SizeParams
from cyclic_formation.simulation.scenario import (
    CenterSpec,
    ControllerSpec,
    FormationSpec,
    InitialSpec,
    LagSpec,
    Scenario,
    SimSpec,
    SizeSpec,
    VehicleSpec,
    validate_scenario,
)
from cyclic_formation.vehicles.quadcopter import QuadParams, TrackerGains

# =========================================================================
# Controller parameters
# =========================================================================


class CyclicParamsFactory(factory.Factory):
    """
    Factory for symmetric cyclic controllers.

    Defaults to a hexagon with one neighbour per side and unit gain.

    Example:
        params = CyclicParamsFactory()
        params = CyclicParamsFactory(n=8, N=2, gains=(1.0, 0.5))
    """

    class Meta:
        model = CyclicParams

    n = 6
    N = 1
    gains = factory.LazyAttribute(lambda obj: (1.0,) * obj.N)


class SizeParamsFactory(factory.Factory):
    class Meta:
        model = SizeParams

    rho = 2.0
    alpha_s0 = float(np.deg2rad(5.0))
    fs = "tanh"
    tau = 0.1


class CenterParamsFactory(factory.Factory):
    class Meta:
        model = CenterParams

    x_c = (0.0, 0.0, -10.0)
    k_c = 0.5
    tau = 0.1


class CollisionParamsFactory(factory.Factory):
    class Meta:
        model = CollisionParams

    r1 = 0.4
    r2 = 1.2
    variant = "hard"


class QuadParamsFactory(factory.Factory):
    class Meta:
        model = QuadParams

    mass = 1.0
    gravity = 9.81


class TrackerGainsFactory(factory.Factory):
    class Meta:
        model = TrackerGains

    v_max = 3.0


# =========================================================================
# Scenarios
# =========================================================================


class FormationSpecFactory(factory.Factory):
    class Meta:
        model = FormationSpec

    kind = "polygon"
    n = 6


class ControllerSpecFactory(factory.Factory):
    class Meta:
        model = ControllerSpec

    horizon = 1
    gains = (1.0,)


class SizeSpecFactory(factory.Factory):
    class Meta:
        model = SizeSpec

    rho_m = 2.0
    alpha_s0_deg = 5.0


class CenterSpecFactory(factory.Factory):
    class Meta:
        model = CenterSpec

    x_c_m = (0.0, 0.0, -2.0)
    k_c = 0.5


class InitialSpecFactory(factory.Factory):
    class Meta:
        model = InitialSpec

    kind = "random_ball"
    radius_m = 2.0


class SimSpecFactory(factory.Factory):
    class Meta:
        model = SimSpec

    t_end_s = 2.0
    dt_s = 0.01
    log_interval_s = 0.05


def _quadcopter_vehicle() -> VehicleSpec:
    return VehicleSpec(model="quadcopter", v_max_mps=3.0)


class ScenarioFactory(factory.Factory):
    """
    Factory for validated point-mass polygon scenarios.

    Traits:
        sized: add size control toward rho = 2 m
        centered: add center control toward (0, 0, -2)
        quadcopter: fly quadcopters instead of point masses

    Example:
        scenario = ScenarioFactory()
        scenario = ScenarioFactory(sized=True, centered=True)
        scenario = ScenarioFactory.build(sim__t_end_s=-1.0)  # skips validation
    """

    class Meta:
        model = Scenario

    class Params:
        sized = factory.Trait(size=factory.SubFactory(SizeSpecFactory))
        centered = factory.Trait(center=factory.SubFactory(CenterSpecFactory))
        quadcopter = factory.Trait(vehicle=factory.LazyFunction(_quadcopter_vehicle))

    name = factory.Sequence(lambda n: f"scenario{n}")
    seed = factory.Sequence(lambda n: n)
    formation = factory.SubFactory(FormationSpecFactory)
    controller = factory.SubFactory(ControllerSpecFactory)
    lag = factory.LazyFunction(LagSpec)
    initial = factory.SubFactory(InitialSpecFactory)
    sim = factory.SubFactory(SimSpecFactory)

    @classmethod
    def _create(
        cls, model_class: type[Scenario], *args: Any, **kwargs: Any
    ) -> Scenario:
        scenario = model_class(*args, **kwargs)
        validate_scenario(scenario)
        return scenario
