"""
Pytest fixtures for formation-control testing.

This module is registered as a pytest plugin via the pytest11 entry point.
When cyclic-formation is installed, these fixtures are automatically
available in tests.

Available fixtures:
    - formation_seed: Seed from ``--formation-seed`` (default 2015)
    - formation_rng: numpy Generator seeded with formation_seed
    - hexagon_params: Symmetric N=2 hexagon controller with k = (2, 2)
    - hexagon_constraints: Constraint matrix of the horizontal hexagon
    - cube_development: Faces and rules of the built-in unit cube
    - scenario_factory: ScenarioFactory for validated test scenarios
    - output_dir: Temporary directory exported as the default output dir

Usage:
    # In your conftest.py, the fixtures are automatically available
    def test_something(hexagon_params, formation_rng):
        x = formation_rng.standard_normal(3 * hexagon_params.n)
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from cyclic_formation.core.cyclic import CyclicParams
from cyclic_formation.core.polyhedron import Development
from cyclic_formation.core.subspace import (
    ConstraintMatrix,
    PolygonSpec,
    build_polygon_V,
)
from cyclic_formation.simulation.scenario import OUTPUT_DIR_ENV
from cyclic_formation.simulation.shapes import build_shape
from cyclic_formation.utils.factories import ScenarioFactory

DEFAULT_SEED = 2015


def pytest_addoption(parser: pytest.Parser) -> None:
    group = parser.getgroup("cyclic-formation")
    group.addoption(
        "--formation-seed",
        type=int,
        default=DEFAULT_SEED,
        help="seed for the formation_rng fixture",
    )


def pytest_configure(config: pytest.Config) -> None:
    config.addinivalue_line("markers", "slow: long-running simulation tests")


@pytest.fixture
def formation_seed(request: pytest.FixtureRequest) -> int:
    """
    Return the seed for random test data.

    Override on the command line with ``--formation-seed``.
    """
    return int(request.config.getoption("--formation-seed"))


@pytest.fixture
def formation_rng(formation_seed: int) -> np.random.Generator:
    return np.random.default_rng(formation_seed)


@pytest.fixture
def hexagon_params() -> CyclicParams:
    """
    Return the six-robot, two-neighbour controller with k = (2, 2).

    Its contraction rate is 4 sqrt(3), about 6.928.
    """
    return CyclicParams(n=6, N=2, gains=(2.0, 2.0))


@pytest.fixture
def hexagon_constraints() -> ConstraintMatrix:
    return build_polygon_V(PolygonSpec(6))


@pytest.fixture
def cube_development() -> Development:
    return build_shape("cube", 1.0).development


@pytest.fixture
def scenario_factory() -> type[ScenarioFactory]:
    """
    Return the scenario factory.

    Example:
        def test_run(scenario_factory):
            scenario = scenario_factory(sized=True, sim__t_end_s=1.0)
    """
    return ScenarioFactory


@pytest.fixture
def output_dir(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Path:
    """Point the default output directory at a temporary path."""
    out = tmp_path / "formation-output"
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(out))
    return out
