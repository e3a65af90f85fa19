import numpy as np
import pytest
from scipy.integrate import quad

from speckin.grid import VelocityGrid, build_grids
from speckin.kernel import (SMALL_PHASE, KernelSpec, build_cache, eval_G,
                            eval_G_hat, eval_I, eval_J, radial_integral_direct,
                            radial_profiles, sinc)


def test_spec_validation():
    with pytest.raises(ValueError):
        KernelSpec(lam=-0.1, e=1.0)
    with pytest.raises(ValueError):
        KernelSpec(lam=1.5, e=1.0)
    with pytest.raises(ValueError):
        KernelSpec(lam=0.0, e=1.1)
    with pytest.raises(ValueError):
        KernelSpec(lam=0.0, e=1.0, C=0.0)
    spec = KernelSpec(lam=0.0, e=0.5)
    assert spec.beta == pytest.approx(0.75)


def test_sinc_basics():
    assert sinc(0.0) == 1.0
    x = np.array([1e-8, 0.5, np.pi, 10.0])
    assert np.allclose(sinc(x), np.sin(x) / x)


@pytest.mark.parametrize("lam", [0.0, 0.31, 0.5, 1.0])
def test_radial_profiles_vs_quad(lam):
    # Kt(x) = int_0^1 s^lam cos(xs) ds,  St(x) = int_0^1 s^(lam+1) sin(xs) ds
    xs = np.array([1e-6, 0.05, 0.099, 0.101, 1.0, 7.3, 40.0, 173.0])
    kt, st = radial_profiles(xs, lam)
    # closed forms are ~1e-12; fractional lam uses panel quadrature whose
    # error is set by the s^lam kink at the origin (~5e-7 absolute)
    tol = 1e-11 if lam in (0.0, 1.0) else 2e-6
    for i, x in enumerate(xs):
        kq, _ = quad(lambda s: s**lam * np.cos(x * s), 0, 1, limit=400)
        sq, _ = quad(lambda s: s**(lam + 1) * np.sin(x * s), 0, 1, limit=400)
        assert kt[i] == pytest.approx(kq, abs=tol)
        assert st[i] == pytest.approx(sq, abs=tol)


@pytest.mark.parametrize("lam", [0.0, 1.0])
def test_series_branch_continuity(lam):
    # closed form and small-x series must agree across the switch
    eps = 1e-13   # small enough that the derivative term is ~3e-15
    lo, _ = radial_profiles(np.array([0.1 - eps]), lam)
    hi, _ = radial_profiles(np.array([0.1 + eps]), lam)
    assert lo[0] == pytest.approx(hi[0], abs=1e-12)


def test_table_vs_direct_integral():
    grid = VelocityGrid(16, 5.0)
    for lam in (0.0, 0.5, 1.0):
        spec = KernelSpec(lam=lam, e=1.0)
        cache = build_cache(spec, grid)
        rng = np.random.default_rng(7)
        # stay inside the tabulated phase range: (a+b) R <= x_max
        hi = 0.45 * cache.x_max / cache.R
        a = rng.uniform(0.05, hi, 40)
        b = rng.uniform(0.05, hi, 40)
        exact = radial_integral_direct(lam, cache.R, a, b)
        got = eval_I(cache, a, b)
        tol = 1e-8 if lam in (0.0, 1.0) else 1e-5
        assert np.max(np.abs(got - exact)) < tol * np.max(np.abs(exact))
        cj = rng.uniform(0.05, 2.0 * hi, 40)
        exact_j = radial_integral_direct(lam, cache.R, cj)
        assert np.max(np.abs(eval_J(cache, cj) - exact_j)) \
            < tol * np.max(np.abs(exact_j))


def test_default_truncation_radius_is_L():
    grid = VelocityGrid(8, 5.0)
    cache = build_cache(KernelSpec(lam=0.0, e=1.0), grid)
    assert cache.R == grid.L
    cache2 = build_cache(KernelSpec(lam=0.0, e=1.0), grid, R=7.0)
    assert cache2.R == 7.0


def test_loss_calibration_delta():
    # h_z^3 sum_xi ghat(xi) 4 pi J(|xi|) == (2 pi)^3 ghat(0): the truncated
    # |u|-ball must cover exactly one periodization cell of the u-series.
    from speckin.grid import maxwellian, sample
    from speckin.transform import to_fourier
    grid, sgrid = build_grids(16, 5.0)
    cache = build_cache(KernelSpec(lam=0.0, e=1.0), grid)
    gh = to_fourier(sample(grid, maxwellian(1.0)), sgrid)
    r = sgrid.radius_grid()
    total = sgrid.h**3 * np.sum(gh.values * 4.0 * np.pi * eval_J(cache, r))
    c = grid.N // 2
    expected = (2.0 * np.pi) ** 3 * gh.values[c, c, c]
    assert abs(total - expected) < 1e-4 * abs(expected)


def test_G_closed_form_properties():
    spec = KernelSpec(lam=1.0, e=0.5)
    rng = np.random.default_rng(3)
    u = rng.standard_normal(3)
    # G(u, 0) = 0: the gain and loss angular factors cancel at zeta = 0
    assert abs(eval_G(spec, u, np.zeros(3))) < 1e-15
    # |G| <= 2 C 4 pi |u|^lam
    z = rng.standard_normal(3) * 3.0
    bound = 2.0 * spec.C * 4.0 * np.pi * np.linalg.norm(u) ** spec.lam
    assert abs(eval_G(spec, u, z)) <= bound + 1e-12


def test_G_hat_table_vs_direct():
    grid = VelocityGrid(8, 5.0)
    rng = np.random.default_rng(11)
    for lam, e in ((0.0, 1.0), (1.0, 0.75), (0.5, 0.5)):
        spec = KernelSpec(lam=lam, e=e)
        cache = build_cache(spec, grid)
        for _ in range(25):
            xi = rng.uniform(-4.0, 4.0, 3)
            zeta = rng.uniform(-4.0, 4.0, 3)
            a = eval_G_hat(cache, xi, zeta, method="table")
            b = eval_G_hat(cache, xi, zeta, method="direct")
            assert abs(a - b) < 1e-8 * max(1.0, abs(b))


def test_small_phase_branch_continuity():
    grid = VelocityGrid(8, 5.0)
    cache = build_cache(KernelSpec(lam=0.0, e=1.0), grid)
    # J just below and above the small-phase switch
    lo = eval_J(cache, np.array([SMALL_PHASE * (1 - 1e-3) / cache.R]))
    hi = eval_J(cache, np.array([SMALL_PHASE * (1 + 1e-3) / cache.R]))
    assert lo[0] == pytest.approx(hi[0], rel=1e-6)
