"""Collision model parameters and the spectral weight functions.

For an isotropic variable-hard-potential model the Fourier-space weight is

    G(u, z)  = C * 4pi * |u|^lam * [exp(i b z.u / 2) sinc(b |u||z| / 2) - 1]
    Gh(x, z) = 16 pi^2 C * int_0^R r^(lam+2) [sinc(r b|z|/2) sinc(r |x - b z/2|)
                                              - sinc(r |x|)] dr

with b = (1+e)/2, R = 2*sqrt(3)*L and sinc(t) = sin(t)/t.  The radial
integrals reduce to the two universal antiderivative profiles

    Kt(x) = int_0^1 s^lam    cos(x s) ds
    St(x) = int_0^1 s^(lam+1) sin(x s) ds

through int r^(lam+2) sinc(ar) sinc(br) dr
        = R^(lam+3) * (Kt(R|a-b|) - Kt(R(a+b))) / (2 Ra Rb),
    int r^(lam+2) sinc(ar) dr = R^(lam+3) * St(Ra) / Ra,

so a cache holds Kt and St densely sampled in the phase variable x = c*R.
Closed forms exist for lam = 0 and lam = 1; other exponents are built by
oscillation-resolving composite Gauss-Legendre quadrature.
"""

from dataclasses import dataclass, field

import numpy as np

from .grid import SpectralGrid, VelocityGrid

FOUR_PI = 4.0 * np.pi

# below x = c*R = 1e-4 the sinc factors are replaced by their limits;
# the relative substitution error is x^2/6 ~ 2e-9
SMALL_PHASE = 1e-4

# series/closed-form switch for the antiderivative profiles
_SERIES_X = 0.1


def sinc(x):
    """Unnormalized sinc: sin(x)/x with sinc(0) = 1."""
    return np.sinc(np.asarray(x) / np.pi)


@dataclass(frozen=True)
class KernelSpec:
    """Isotropic VHP collision model: rate C*|u|^lam, restitution e."""

    lam: float = 0.0
    e: float = 1.0
    C: float = 1.0 / FOUR_PI

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"kernel.lambda must lie in [0, 1], got {self.lam}")
        if not 0.0 <= self.e <= 1.0:
            raise ValueError(f"kernel.e must lie in [0, 1], got {self.e}")
        if not self.C > 0:
            raise ValueError(f"kernel.C_lambda must be positive, got {self.C}")

    @property
    def beta(self):
        return 0.5 * (1.0 + self.e)

    @property
    def grad_normalized(self):
        """True when the angular cross section integrates to 1 over S^2."""
        return abs(self.C * FOUR_PI - 1.0) < 1e-12


def eval_G(spec: KernelSpec, u, zeta):
    """Spectral weight G(u, zeta); complex, vanishes at zeta = 0."""
    u = np.asarray(u, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    un = np.sqrt(np.sum(u * u, axis=-1))
    zn = np.sqrt(np.sum(zeta * zeta, axis=-1))
    dot = np.sum(u * zeta, axis=-1)
    b = spec.beta
    bracket = np.exp(0.5j * b * dot) * sinc(0.5 * b * un * zn) - 1.0
    return spec.C * FOUR_PI * un**spec.lam * bracket


# ---------------------------------------------------------------------------
# universal antiderivative profiles


def _Kt_closed(x, lam):
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < _SERIES_X
    xs = np.where(small, 1.0, x)  # avoid 0/0 warnings
    x2 = x * x
    if lam == 0:
        series = 1.0 - x2 / 6.0 + x2 * x2 / 120.0 - x2 * x2 * x2 / 5040.0
        closed = np.sin(xs) / xs
    elif lam == 1:
        series = 0.5 - x2 / 8.0 + x2 * x2 / 144.0 - x2 * x2 * x2 / 5760.0
        closed = (np.cos(xs) + xs * np.sin(xs) - 1.0) / (xs * xs)
    else:
        raise ValueError("closed form only for lam in {0, 1}")
    return np.where(small, series, closed)


def _St_closed(x, lam):
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < _SERIES_X
    xs = np.where(small, 1.0, x)
    x2 = x * x
    if lam == 0:
        series = x * (1.0 / 3.0 - x2 / 30.0 + x2 * x2 / 840.0)
        closed = (np.sin(xs) - xs * np.cos(xs)) / (xs * xs)
    elif lam == 1:
        series = x * (0.25 - x2 / 36.0 + x2 * x2 / 960.0)
        closed = (2.0 * xs * np.sin(xs) + (2.0 - x2) * np.cos(xs) - 2.0) / (xs**3)
    else:
        raise ValueError("closed form only for lam in {0, 1}")
    return np.where(small, series, closed)


def _gauss_panels(x_max, points_per_panel=12, phase_per_panel=2.5):
    """Composite Gauss-Legendre nodes/weights on [0, 1] resolving cos(x s)
    oscillation up to x = x_max."""
    panels = max(8, int(np.ceil(x_max / phase_per_panel)))
    gx, gw = np.polynomial.legendre.leggauss(points_per_panel)
    edges = np.linspace(0.0, 1.0, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])[:, None]
    half = 0.5 * (edges[1:] - edges[:-1])[:, None]
    nodes = (mid + half * gx[None, :]).ravel()
    weights = (half * gw[None, :]).ravel()
    return nodes, weights


def _profiles_quadrature(x, lam):
    """Kt and St at the phase values x for fractional lam, by quadrature."""
    x = np.asarray(x, dtype=float)
    s, w = _gauss_panels(float(np.max(x)) if x.size else 1.0)
    wk = w * s**lam
    ws = w * s ** (lam + 1.0)
    kt = np.empty_like(x)
    st = np.empty_like(x)
    chunk = max(1, int(4e6 // max(s.size, 1)))
    for lo in range(0, x.size, chunk):
        hi = min(lo + chunk, x.size)
        phase = np.outer(x.ravel()[lo:hi], s)
        kt.ravel()[lo:hi] = np.cos(phase) @ wk
        st.ravel()[lo:hi] = np.sin(phase) @ ws
    return kt, st


def radial_profiles(x, lam):
    """Kt(x), St(x) for any lam in [0, 1]."""
    if lam in (0.0, 1.0):
        return _Kt_closed(x, lam), _St_closed(x, lam)
    return _profiles_quadrature(x, lam)


def radial_integral_direct(lam, R, a, b=None, points_per_panel=12):
    """Direct quadrature of int_0^R r^(lam+2) sinc(ar) sinc(br) dr
    (single sinc when b is None).  Oracle-quality, no tables."""
    a = np.asarray(a, dtype=float)
    scale = R ** (lam + 3.0)
    if b is None:
        x_max = float(np.max(a)) * R
    else:
        b = np.asarray(b, dtype=float)
        x_max = float(np.max(a) + np.max(b)) * R
    s, w = _gauss_panels(x_max, points_per_panel)
    rs = s * R
    integrand = w * s ** (lam + 2.0)
    if b is None:
        shape = a.shape
        af = a.ravel()
        bf = None
    else:
        shape = np.broadcast(a, b).shape
        af = np.broadcast_to(a, shape).ravel()
        bf = np.broadcast_to(b, shape).ravel()
    out = np.empty(af.size)
    chunk = max(1, int(2e7 // max(rs.size, 1)))
    for lo in range(0, af.size, chunk):
        hi = min(lo + chunk, af.size)
        vals = sinc(np.outer(af[lo:hi], rs))
        if bf is not None:
            vals *= sinc(np.outer(bf[lo:hi], rs))
        out[lo:hi] = vals @ integrand
    return scale * out.reshape(shape)


# ---------------------------------------------------------------------------
# cache


@dataclass
class KernelCache:
    """Immutable per-grid tables for evaluating Gh(x, z).

    ``I`` and ``J`` are the radial integrals on the uniform (a, b) lattice
    of resolution M_r; the dense phase-variable profiles ``kt``/``st``
    (spacing ``dx``) drive the production interpolation path.
    """

    spec: KernelSpec
    L: float
    R: float
    a_max: float
    M_r: int
    a_grid: np.ndarray
    I: np.ndarray
    J: np.ndarray
    x_max: float
    dx: float
    kt: np.ndarray
    st: np.ndarray

    @property
    def I00(self):
        return self.R ** (self.spec.lam + 3.0) / (self.spec.lam + 3.0)

    @property
    def scale(self):
        """R^(lam+3), the dimensional factor of the radial integrals."""
        return self.R ** (self.spec.lam + 3.0)

    @property
    def prefactor(self):
        """16 pi^2 C_lambda multiplying the radial bracket."""
        return 16.0 * np.pi**2 * self.spec.C


def _cubic_interp(tab, x, inv_dx):
    """Vectorized 4-point (Catmull-Rom) interpolation on a uniform table."""
    p = np.asarray(x, dtype=float) * inv_dx
    j = np.clip(p.astype(np.int64), 1, tab.size - 3)
    w = p - j
    w2 = w * w
    w3 = w2 * w
    return (tab[j - 1] * (-0.5 * w3 + w2 - 0.5 * w)
            + tab[j] * (1.5 * w3 - 2.5 * w2 + 1.0)
            + tab[j + 1] * (-1.5 * w3 + 2.0 * w2 + 0.5 * w)
            + tab[j + 2] * (0.5 * w3 - 0.5 * w2))


def _st_over_x(cache, t):
    """St(t)/t, switching to its Taylor series below the first table cells
    (the 1/t amplification makes interpolation there unacceptable)."""
    t = np.asarray(t, dtype=float)
    lam = cache.spec.lam
    small = t < 0.05
    ts = np.where(small, 1.0, t)
    interp = _cubic_interp(cache.st, ts, 1.0 / cache.dx) / ts
    t2 = t * t
    series = (1.0 / (lam + 3.0) - t2 / (6.0 * (lam + 5.0))
              + t2 * t2 / (120.0 * (lam + 7.0)))
    return np.where(small, series, interp)


def _I_dimless(cache, ta, tb):
    """I(a,b) / R^(lam+3) from the dense profiles; ta = a*R, tb = b*R."""
    ta = np.asarray(ta, dtype=float)
    tb = np.asarray(tb, dtype=float)
    inv = 1.0 / cache.dx
    lam = cache.spec.lam
    both = (ta < SMALL_PHASE) & (tb < SMALL_PHASE)
    asmall = (ta < SMALL_PHASE) & ~both
    bsmall = (tb < SMALL_PHASE) & ~both
    generic = ~(both | asmall | bsmall)
    out = np.empty(np.broadcast(ta, tb).shape)
    out[...] = 1.0 / (lam + 3.0)
    tby = np.broadcast_to(tb, out.shape)
    tax = np.broadcast_to(ta, out.shape)
    if np.any(asmall):
        out[asmall] = _st_over_x(cache, tby[asmall])
    if np.any(bsmall):
        out[bsmall] = _st_over_x(cache, tax[bsmall])
    if np.any(generic):
        t1 = tax[generic]
        t2 = tby[generic]
        out[generic] = (_cubic_interp(cache.kt, np.abs(t1 - t2), inv)
                        - _cubic_interp(cache.kt, t1 + t2, inv)) / (2.0 * t1 * t2)
    return out


def _J_dimless(cache, tc):
    """J(c) / R^(lam+3); tc = c*R."""
    return _st_over_x(cache, np.asarray(tc, dtype=float))


def build_cache(spec: KernelSpec, grid: VelocityGrid, M_r: int = 256,
                dx_phase: float = 0.0025, R: float = None) -> KernelCache:
    """Tabulate the radial integrals for the grid's Fourier lattice.

    R is the radius of the relative-velocity ball the weight is integrated
    over.  The default is the ball inscribed in one period cell of the
    discrete Fourier series, R = L: with it the loss term reproduces
    rho_g * fh exactly on the lattice (the cut-off sphere integral sums to
    (2pi)^3 against the mode spacing) and the gain term is exact whenever
    the distribution is supported within |v| <= L/2.  Larger radii pull in
    spurious mass from the periodized copies of the distribution (u-space
    periodization has period 2L), so the naive doubled-domain choice
    2*sqrt(3)*L over-counts the loss by a fixed factor of ~23.
    """
    if M_r < 64:
        raise ValueError(f"kernel.table_resolution must be >= 64, got {M_r}")
    if R is None:
        R = float(grid.L)
    if R <= 0:
        raise ValueError(f"truncation radius must be positive, got {R}")
    sgrid = SpectralGrid(grid)
    z_max = np.sqrt(3.0) * sgrid.L
    b = spec.beta
    # radial arguments: b|z|/2, |x - b z/2|, |x| over the whole lattice
    a_max = z_max * (1.0 + 0.5 * b)
    x_max = (1.0 + b) * z_max * R * (1.0 + 1e-9) + 4.0 * dx_phase
    n_tab = int(np.ceil(x_max / dx_phase)) + 4
    xs = dx_phase * np.arange(n_tab)
    kt, st = radial_profiles(xs, spec.lam)
    cache = KernelCache(
        spec=spec, L=float(grid.L), R=float(R), a_max=a_max, M_r=M_r,
        a_grid=np.linspace(0.0, a_max, M_r + 1),
        I=np.empty(0), J=np.empty(0),
        x_max=xs[-1], dx=dx_phase, kt=kt, st=st,
    )
    ag = cache.a_grid
    cache.J = cache.scale * _J_dimless(cache, ag * R)
    ta = ag * R
    cache.I = cache.scale * _I_dimless(cache, ta[:, None], ta[None, :])
    return cache


def eval_I(cache: KernelCache, a, b):
    """int_0^R r^(lam+2) sinc(ar) sinc(br) dr from the cache."""
    return cache.scale * _I_dimless(cache, np.asarray(a) * cache.R,
                                    np.asarray(b) * cache.R)


def eval_J(cache: KernelCache, c):
    """int_0^R r^(lam+2) sinc(cr) dr from the cache."""
    return cache.scale * _J_dimless(cache, np.asarray(c) * cache.R)


def gh_arguments(spec: KernelSpec, xi, zeta):
    """The three radial arguments (b|z|/2, |x - b z/2|, |x|) of Gh."""
    xi = np.asarray(xi, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    b = spec.beta
    a = 0.5 * b * np.sqrt(np.sum(zeta * zeta, axis=-1))
    shift = xi - 0.5 * b * zeta
    bb = np.sqrt(np.sum(shift * shift, axis=-1))
    xn = np.sqrt(np.sum(xi * xi, axis=-1))
    return a, bb, xn


def eval_G_hat(cache: KernelCache, xi, zeta, method="table"):
    """Transformed weight Gh(xi, zeta); real by construction.

    ``method='table'`` interpolates the cached profiles and falls back to
    direct quadrature if an argument exceeds the tabulated range;
    ``method='direct'`` always integrates.
    """
    spec = cache.spec
    a, b, xn = gh_arguments(spec, xi, zeta)
    if method == "table":
        in_range = ((a + b) * cache.R <= cache.x_max) & (xn * cache.R <= cache.x_max)
        if np.all(in_range):
            gain = eval_I(cache, a, b)
            loss = eval_J(cache, xn)
            return cache.prefactor * (gain - loss)
        method = "direct"
    if method != "direct":
        raise ValueError(f"unknown eval_G_hat method {method!r}")
    gain = radial_integral_direct(spec.lam, cache.R, a, b)
    loss = radial_integral_direct(spec.lam, cache.R, xn)
    return cache.prefactor * (gain - loss)
