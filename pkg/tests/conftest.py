import warnings

import numpy as np
import pytest

warnings.filterwarnings("ignore", message=".*TBB.*")

from speckin.grid import build_grids, maxwellian, quadrature_weights, sample


@pytest.fixture(scope="session")
def grids8():
    return build_grids(8, 5.0)


@pytest.fixture(scope="session")
def grids16():
    return build_grids(16, 5.0)


@pytest.fixture(scope="session")
def maxwellian16(grids16):
    grid, _ = grids16
    return sample(grid, maxwellian(1.0))


@pytest.fixture(scope="session")
def weights16(grids16):
    return quadrature_weights(grids16[0])


def random_state(grid, seed, T=1.0):
    """Positive, smooth, slightly perturbed Maxwellian-like state."""
    rng = np.random.default_rng(seed)
    vx, vy, vz = grid.meshgrid()
    base = np.exp(-(vx**2 + vy**2 + vz**2) / (2.0 * T))
    bumps = np.zeros_like(base)
    for _ in range(3):
        c = rng.uniform(-1.0, 1.0, size=3)
        w = rng.uniform(0.5, 1.5)
        a = rng.uniform(0.1, 0.5)
        bumps += a * np.exp(-((vx - c[0])**2 + (vy - c[1])**2
                             + (vz - c[2])**2) / (2.0 * w))
    from speckin.grid import GridFunction, VELOCITY
    return GridFunction(grid, base + bumps, VELOCITY)
