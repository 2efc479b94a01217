import numpy as np
import pytest

import budgetlloyd as bl


def rand_instance(seed, n=8, grid_n=64, region=None, hetero=True, density="uniform"):
    """Random fleet/grid/density tuple for property-style tests."""
    rng = np.random.Generator(np.random.Philox(seed))
    region = region or bl.Region(0.0, 0.0, 1.0, 1.0)
    eta = rng.uniform(0.5, 2.0, n) if hetero else np.ones(n)
    xi = rng.uniform(0.5, 3.0, n) if hetero else np.ones(n)
    pts = np.empty((n, 2))
    pts[:, 0] = region.xmin + rng.random(n) * region.width
    pts[:, 1] = region.ymin + rng.random(n) * region.height
    fleet = bl.make_fleet(eta, xi, 0.2, pts)
    grid = bl.build_grid(region, grid_n, grid_n)
    dens = bl.DensityField(density)
    return fleet, grid, dens


@pytest.fixture
def unit_grid_256():
    return bl.build_grid(bl.Region(0.0, 0.0, 1.0, 1.0), 256, 256)


@pytest.fixture
def uniform():
    return bl.uniform_density()
