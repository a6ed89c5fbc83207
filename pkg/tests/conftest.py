import numpy as np
import pytest

from gkpsim import GridSpec, GridWavefunction, hermite_phi
from gkpsim.wavefield import from_samples


@pytest.fixture(scope="session")
def grid():
    return GridSpec()


@pytest.fixture(scope="session")
def number_state(grid):
    """phi_n as a normalized grid state."""

    def build(n):
        return from_samples(grid, hermite_phi(n, grid.x))

    return build


@pytest.fixture(scope="session")
def small_grid():
    return GridSpec(half_width=20.0, points=1024)
