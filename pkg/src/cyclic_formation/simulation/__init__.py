"""
Scenarios, simulation and campaigns.

- scenario: JSON scenario documents
- shapes: built-in polyhedra
- model: controllers resolved from a scenario
- engine: fixed-step runs with the lag schedule
- metrics: convergence summaries
- montecarlo: seeded campaigns
- export: CSV, JSON and JSON-lines output
"""

from cyclic_formation.simulation.engine import (
    Event,
    LagSchedule,
    TrajectoryLog,
    initial_positions,
    run,
)
from cyclic_formation.simulation.export import (
    write_certification_json,
    write_events_jsonl,
    write_metrics_json,
    write_montecarlo,
    write_run,
    write_trajectory_csv,
)
from cyclic_formation.simulation.indexing import IndexAssignment, assign_indices
from cyclic_formation.simulation.integrators import Integrator, integrate
from cyclic_formation.simulation.metrics import RunMetrics, compute_metrics
from cyclic_formation.simulation.model import FormationModel
from cyclic_formation.simulation.montecarlo import (
    MonteCarloReport,
    MonteCarloRun,
    monte_carlo,
)
from cyclic_formation.simulation.scenario import (
    Scenario,
    bundled_scenarios,
    emit_scenario,
    load_scenario,
    parse_scenario,
)
from cyclic_formation.simulation.shapes import (
    ShapeTemplate,
    build_shape,
    shape_names,
    skeleton_scenario,
)

__all__ = [
    "Event",
    "FormationModel",
    "IndexAssignment",
    "Integrator",
    "LagSchedule",
    "MonteCarloReport",
    "MonteCarloRun",
    "RunMetrics",
    "Scenario",
    "ShapeTemplate",
    "TrajectoryLog",
    "assign_indices",
    "build_shape",
    "bundled_scenarios",
    "compute_metrics",
    "emit_scenario",
    "initial_positions",
    "integrate",
    "load_scenario",
    "monte_carlo",
    "parse_scenario",
    "run",
    "shape_names",
    "skeleton_scenario",
    "write_certification_json",
    "write_events_jsonl",
    "write_metrics_json",
    "write_montecarlo",
    "write_run",
    "write_trajectory_csv",
]
