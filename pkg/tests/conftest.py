"""Pytest configuration for cyclic-formation tests."""

import pytest

from cyclic_formation.facade import Formation


@pytest.fixture
def short_formation(scenario_factory):
    """
    Return a facade over a 0.2 s point-mass hexagon run.

    Returns:
        Formation: Unit gain, one neighbour, random start in a 2 m ball
    """
    return Formation(scenario_factory(sim__t_end_s=0.2))
