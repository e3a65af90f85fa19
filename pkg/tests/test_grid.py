import numpy as np
import pytest

from speckin.grid import (FOURIER, VELOCITY, GridFunction, SpectralGrid,
                          VelocityGrid, build_grids, maxwellian,
                          quadrature_weights, sample)


def test_grid_validation():
    with pytest.raises(ValueError):
        VelocityGrid(7, 5.0)      # odd
    with pytest.raises(ValueError):
        VelocityGrid(2, 5.0)      # too small
    with pytest.raises(ValueError):
        VelocityGrid(8, 0.0)      # degenerate box


def test_axis_half_open():
    grid = VelocityGrid(8, 4.0)
    a = grid.axis
    assert a[0] == -4.0
    assert a[-1] == pytest.approx(4.0 - grid.h)
    assert 4.0 not in a
    assert a[grid.N // 2] == 0.0          # v = 0 is a node
    assert np.allclose(np.diff(a), grid.h)


def test_dual_grid_exact_pairing():
    for N, L in [(8, 5.0), (16, 3.0), (24, 8.0)]:
        vgrid, sgrid = build_grids(N, L)
        assert vgrid.h * sgrid.h == pytest.approx(2.0 * np.pi / N, rel=1e-15)
        assert sgrid.axis[N // 2] == 0.0


def test_gridfunction_validation():
    grid = VelocityGrid(8, 5.0)
    with pytest.raises(ValueError):
        GridFunction(grid, np.zeros((8, 8, 4)), VELOCITY)
    with pytest.raises(ValueError):
        GridFunction(grid, np.zeros((8, 8, 8)), "momentum")
    f = GridFunction(grid, np.zeros((8, 8, 8)), VELOCITY)
    with pytest.raises(ValueError):
        f.require(FOURIER)
    assert f.require(VELOCITY) is f


def test_sample_rejects_nonfinite():
    grid = VelocityGrid(8, 5.0)
    with pytest.raises(FloatingPointError):
        sample(grid, lambda x, y, z: 1.0 / (x - grid.axis[1]))


def test_quadrature_weights_structure():
    grid = VelocityGrid(8, 4.0)
    w = quadrature_weights(grid)
    assert w.shape == (8, 8, 8)
    assert w[0, 0, 0] == pytest.approx(grid.h**3 / 8.0)
    assert w[3, 4, 5] == pytest.approx(grid.h**3)
    assert w[0, 3, 3] == pytest.approx(grid.h**3 / 2.0)


def test_maxwellian_moments():
    grid = VelocityGrid(24, 6.0)
    w = quadrature_weights(grid)
    V = np.array([0.3, -0.2, 0.1])
    f = sample(grid, maxwellian(1.2, V, rho=2.0))
    vx, vy, vz = grid.meshgrid()
    rho = (w * f.values).sum()
    assert rho == pytest.approx(2.0, rel=1e-5)
    mean = np.array([(w * f.values * c).sum() for c in (vx, vy, vz)]) / rho
    assert np.allclose(mean, V, atol=1e-6)
    e2 = (w * f.values * ((vx - V[0])**2 + (vy - V[1])**2
                          + (vz - V[2])**2)).sum() / rho
    assert e2 / 3.0 == pytest.approx(1.2, rel=1e-5)
