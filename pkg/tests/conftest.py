import numpy as np
import pytest

from nonkp.initial import random_state
from nonkp.spectral import make_grid

TWO_PI = 2 * np.pi


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def grid16():
    return make_grid(16, 16, TWO_PI, TWO_PI)


@pytest.fixture
def grid32():
    return make_grid(32, 32, TWO_PI, TWO_PI)


def small_state(grid, rng, amplitude=0.1, kmax=None):
    """Random real state band-limited inside the 2/3 window."""
    kmax = kmax if kmax is not None else max(1, min(grid.Nx, grid.Ny) // 4)
    return random_state(grid, amplitude, kmax, rng)


def random_coeff_field(grid, rng):
    """Coefficients of a random real field with every mode populated."""
    from nonkp.spectral import transform

    return transform(rng.standard_normal(grid.shape), grid)


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
