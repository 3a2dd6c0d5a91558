import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture(scope="session")
def grid_48():
    from admbondi.sphere import build_grid
    return build_grid(48, 96)


@pytest.fixture(scope="session")
def grid_16():
    from admbondi.sphere import build_grid
    return build_grid(16, 32)
