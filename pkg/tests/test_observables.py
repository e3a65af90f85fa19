import numpy as np
import pytest

from speckin.grid import GridFunction, VELOCITY, build_grids, maxwellian, \
    quadrature_weights, sample
from speckin.observables import (MOMENT_COLUMNS, MomentSet, axis_slice,
                                 compute_moments, raw_moment, rescaled_moment,
                                 self_similar_rescale_points)


@pytest.fixture(scope="module")
def state():
    grid, _ = build_grids(24, 7.0)
    w = quadrature_weights(grid)
    f = sample(grid, maxwellian(1.3, (0.2, -0.1, 0.4), rho=1.7))
    return grid, w, f


def test_maxwellian_moments(state):
    grid, w, f = state
    ms = compute_moments(f, w, t=2.5)
    assert ms.t == 2.5
    assert ms.rho == pytest.approx(1.7, rel=1e-6)
    assert np.allclose(ms.V, [0.2, -0.1, 0.4], atol=1e-6)
    assert ms.T == pytest.approx(1.3, rel=1e-5)
    assert ms.E == pytest.approx(1.5 * 1.3, rel=1e-5)
    # raw second moment: rho (V_i V_j + T delta_ij)
    assert ms.M2[0, 1] == pytest.approx(1.7 * 0.2 * -0.1, abs=1e-6)
    assert ms.M2[2, 2] == pytest.approx(1.7 * (0.4**2 + 1.3), rel=1e-5)
    assert ms.min_f >= 0.0


def test_row_matches_columns(state):
    _, w, f = state
    row = compute_moments(f, w, 0.0).row()
    assert len(row) == len(MOMENT_COLUMNS)
    assert row[0] == 0.0
    assert row[MOMENT_COLUMNS.index("T")] == pytest.approx(1.3, rel=1e-5)


def test_negative_density_rejected(state):
    grid, w, _ = state
    bad = GridFunction(grid, -np.ones((grid.N,) * 3), VELOCITY)
    with pytest.raises(ValueError):
        compute_moments(bad, w, 0.0)


def test_raw_moment_consistency(state):
    grid, w, f = state
    ms = compute_moments(f, w, 0.0)
    assert raw_moment(f, w, 0.0) == pytest.approx(ms.rho, rel=1e-12)
    # sum w f |v|^2 = rho (|V|^2 + 3 T)
    expect = ms.rho * (np.sum(ms.V**2) + 3.0 * ms.T)
    assert raw_moment(f, w, 1.0) == pytest.approx(expect, rel=1e-12)
    with pytest.raises(ValueError):
        raw_moment(f, w, -0.5)


def test_rescaled_moment_factor(state):
    grid, w, f = state
    raw = raw_moment(f, w, 1.5)
    assert rescaled_moment(f, w, 1.5, t=2.0) == pytest.approx(
        np.exp(-1.5 * (2.0 / 3.0) * 2.0) * raw, rel=1e-13)
    # negative rate amplifies; used on cooling solutions
    assert rescaled_moment(f, w, 1.5, t=2.0, mu1=-2.0 / 3.0) > raw


def test_axis_slice(state):
    grid, w, f = state
    v, fs = axis_slice(f, "x")
    c = grid.N // 2
    assert np.array_equal(v, grid.axis)
    assert np.array_equal(fs, f.values[:, c, c])
    _, fy = axis_slice(f, "y")
    assert np.array_equal(fy, f.values[c, :, c])
    with pytest.raises(ValueError):
        axis_slice(f, "w")


def test_self_similar_rescale_points():
    speeds = np.array([0.0, 1.0, 2.0])
    sp, amp = self_similar_rescale_points(speeds, t=1.5)
    assert np.allclose(sp, speeds * np.exp(0.5))
    assert amp == pytest.approx(np.exp(1.5))
