"""
cyclic-formation: cyclic-pursuit formation control for robot swarms.

This package provides:
- Polygon and polyhedron formation subspaces with their constraint matrices
- Symmetric cyclic controllers and their eigenvalue certificates
- Size, center, collision-avoidance and robustness extensions
- A quadcopter model with a two-level velocity-tracking hierarchy
- A deterministic simulation engine, Monte Carlo campaigns and a CLI
- A pytest plugin and factory_boy factories for test data

Usage:
    from cyclic_formation import Formation

Example:
    formation = Formation.load("hexagon")
    report = formation.certify()
    result = formation.simulate()
    assert result.metrics.converged
"""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("cyclic-formation")
except PackageNotFoundError:  # pragma: no cover - source checkout
    __version__ = "0.0.0"

from cyclic_formation.core import (
    CertificationReport,
    ConstraintMatrix,
    CyclicParams,
    Development,
    PolygonSpec,
    build_polygon_V,
    build_reduced_V,
    cyclic_control,
    extract_minimal_pps,
    theorem4_margin,
    theorem7_certify,
)
from cyclic_formation.exceptions import (
    CollisionError,
    ConsistencyError,
    DivergenceError,
    DomainError,
    FormationError,
    ParameterError,
    ScenarioError,
    StructuralError,
)
from cyclic_formation.facade import Formation, SimulationResult
from cyclic_formation.simulation import Scenario, load_scenario

__all__ = [
    "__version__",
    "CertificationReport",
    "CollisionError",
    "ConsistencyError",
    "ConstraintMatrix",
    "CyclicParams",
    "Development",
    "DivergenceError",
    "DomainError",
    "Formation",
    "FormationError",
    "ParameterError",
    "PolygonSpec",
    "Scenario",
    "ScenarioError",
    "SimulationResult",
    "StructuralError",
    "build_polygon_V",
    "build_reduced_V",
    "cyclic_control",
    "extract_minimal_pps",
    "load_scenario",
    "theorem4_margin",
    "theorem7_certify",
]
