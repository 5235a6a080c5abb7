# tests/conftest.py
import numpy as np
import pytest

from matcore import random_density_matrix
from models import OptimizerConfig


@pytest.fixture
def fast_cfg():
    """Optimizer settings small enough for unit tests, still accurate to ~1e-9."""
    return OptimizerConfig(coarse_grid_per_angle=12, restarts=8, refine_tolerance=1e-10, max_evals=20000, seed=7)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def random_state(rng):
    """Factory of random two-qubit mixed states."""
    def _make():
        return random_density_matrix(4, rng, dims=(2, 2))
    return _make
