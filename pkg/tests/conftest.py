import numpy as np
import pytest

from fdrkit import Curve, Dataset, Grid
from fdrkit.fda import center


@pytest.fixture
def grid():
    return Grid.uniform(20)


@pytest.fixture
def fine_grid():
    return Grid.uniform(100)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def random_curves(grid, rng):
    def make(n=1):
        rows = rng.normal(size=(n, grid.size))
        curves = [Curve(grid, row) for row in rows]
        return curves[0] if n == 1 else curves

    return make


@pytest.fixture
def small_dataset(grid, rng):
    xs = rng.normal(size=(15, grid.size))
    ys = rng.normal(size=15)
    return center(Dataset(grid, xs, ys))
