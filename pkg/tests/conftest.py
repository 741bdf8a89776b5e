"""Pytest fixtures for Pulseman tests."""

import math

import numpy as np
import pytest

from pulseman.conf import reset_propagator
from pulseman.protocols import LevelSystem, StateVector, TransferProblem


@pytest.fixture(autouse=True)
def fresh_propagator():
    """Drop the cached ExactPropagator around every test."""
    reset_propagator()
    yield
    reset_propagator()


@pytest.fixture
def two_level():
    """Single transition at frequency 1."""
    return LevelSystem.from_edges((0.0, 1.0), [(0, 1)])


@pytest.fixture
def star():
    """Level 0 coupled to three leaves at 1.0, 1.3 and 1.7."""
    return LevelSystem.from_edges((0.0, 1.0, 1.3, 1.7), [(0, 1), (0, 2), (0, 3)])


@pytest.fixture
def chain():
    """Path 0-1-2-3 with transitions 1.0, 1.3 and 1.6."""
    return LevelSystem.from_edges((0.0, 1.0, 2.3, 3.9), [(0, 1), (1, 2), (2, 3)])


@pytest.fixture
def triangle():
    """Three levels coupled pairwise (one cycle)."""
    return LevelSystem.from_edges((0.0, 1.0, 2.5), [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture
def hadamard_problem():
    """Weakly driven, nearly resonant two-level transfer to (|0> + |1>)/sqrt(2)."""
    system = LevelSystem.from_edges((0.0, 20.0), [(0, 1)])
    goal = StateVector([1 / math.sqrt(2), 1 / math.sqrt(2)])
    return TransferProblem.from_detuning(system, 1e-4, goal, amplitude_bound=0.05)


@pytest.fixture
def level_scheme(db):
    """Create a stored three-level ladder."""
    from pulseman.models import LevelScheme

    return LevelScheme.objects.create(
        slug="ladder",
        name="Ladder",
        energies=[0.0, 1.0, 2.3],
        couplings=[{"k": 0, "j": 1, "re": 1.0, "im": 0.0}, {"k": 1, "j": 2, "re": 0.5, "im": 0.5}],
    )


@pytest.fixture
def sweep_run(db):
    """Create an empty sweep run."""
    from pulseman.models import SweepRun

    return SweepRun.objects.create(code="run-1", config={"dimensions": [2]}, master_seed=7)
