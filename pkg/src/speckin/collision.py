"""Bilinear spectral collision operator.

Production path: the weighted convolution

    Qh(z_k) = (2pi)^(-3/2) hz^3 * sum_i fh(z_k - x_i) gh(x_i) Gh(x_i, z_k)

with Gh evaluated on the fly from the cached radial profiles (kernel
module).  Terms whose shifted index leaves the lattice are dropped.  A
compiled O(N^6) loop with a fixed inner summation order keeps the result
bit-identical across runs and thread counts.

``collide_direct_oracle`` re-derives the same field from scratch (dense
DFT matrices, per-pair Gauss-Legendre radial quadrature, plain numpy
summation) for N <= 12; it shares no tables or FFTs with the production
path and anchors the equivalence tests.
"""

import numpy as np
from numba import njit, prange

from .grid import FOURIER, GridFunction, SpectralGrid, VelocityGrid
from .kernel import (KernelCache, KernelSpec, SMALL_PHASE,
                     radial_integral_direct, sinc)
from .transform import get_transform

_TWO_PI_32 = (2.0 * np.pi) ** 1.5


@njit(cache=True, inline="always")
def _interp(tab, x, inv_dx):
    p = x * inv_dx
    j = int(p)
    if j < 1:
        j = 1
    elif j > tab.shape[0] - 3:
        j = tab.shape[0] - 3
    w = p - j
    w2 = w * w
    w3 = w2 * w
    return (tab[j - 1] * (-0.5 * w3 + w2 - 0.5 * w)
            + tab[j] * (1.5 * w3 - 2.5 * w2 + 1.0)
            + tab[j + 1] * (-1.5 * w3 + 2.0 * w2 + 0.5 * w)
            + tab[j + 2] * (0.5 * w3 - 0.5 * w2))


@njit(cache=True, parallel=True)
def _qhat_kernel(fh, gh, jtab, axis, beta, R, kt, st, inv_dx, i00,
                 pref, scale, gcut2, fcut2):
    """out[k] = scale * sum_i fh[k-i+half] gh[i] Gh(x_i, z_k)."""
    N = axis.shape[0]
    half = N // 2
    out = np.empty((N, N, N), np.complex128)
    for kk in prange(N * N * N):
        k1 = kk // (N * N)
        rem = kk - k1 * N * N
        k2 = rem // N
        k3 = rem - k2 * N
        z1 = axis[k1]
        z2 = axis[k2]
        z3 = axis[k3]
        c1 = 0.5 * beta * z1
        c2 = 0.5 * beta * z2
        c3 = 0.5 * beta * z3
        ta = R * np.sqrt(c1 * c1 + c2 * c2 + c3 * c3)
        ta_small = ta < SMALL_PHASE
        i1lo = max(0, k1 + half - (N - 1))
        i1hi = min(N - 1, k1 + half)
        i2lo = max(0, k2 + half - (N - 1))
        i2hi = min(N - 1, k2 + half)
        i3lo = max(0, k3 + half - (N - 1))
        i3hi = min(N - 1, k3 + half)
        acc_re = 0.0
        acc_im = 0.0
        for i1 in range(i1lo, i1hi + 1):
            m1 = k1 - i1 + half
            d1 = axis[i1] - c1
            d1sq = d1 * d1
            for i2 in range(i2lo, i2hi + 1):
                m2 = k2 - i2 + half
                d2 = axis[i2] - c2
                d12 = d1sq + d2 * d2
                for i3 in range(i3lo, i3hi + 1):
                    gv = gh[i1, i2, i3]
                    gr = gv.real
                    gi = gv.imag
                    if gr * gr + gi * gi <= gcut2:
                        continue
                    m3 = k3 - i3 + half
                    fv = fh[m1, m2, m3]
                    fr = fv.real
                    fi = fv.imag
                    if fr * fr + fi * fi <= fcut2:
                        continue
                    d3 = axis[i3] - c3
                    tb = R * np.sqrt(d12 + d3 * d3)
                    if ta_small:
                        if tb < SMALL_PHASE:
                            gain = i00
                        else:
                            gain = _interp(st, tb, inv_dx) / tb
                    elif tb < SMALL_PHASE:
                        gain = _interp(st, ta, inv_dx) / ta
                    else:
                        gain = (_interp(kt, abs(ta - tb), inv_dx)
                                - _interp(kt, ta + tb, inv_dx)) / (2.0 * ta * tb)
                    loss = jtab[i1, i2, i3]
                    w = pref * (gain - loss)
                    acc_re += (fr * gr - fi * gi) * w
                    acc_im += (fr * gi + fi * gr) * w
        out[k1, k2, k3] = complex(acc_re * scale, acc_im * scale)
    return out


class CollisionOperator:
    """Binds a kernel cache to one grid pair and precomputes the loss table."""

    def __init__(self, cache: KernelCache, grid: VelocityGrid,
                 truncation: float = 0.0):
        if abs(cache.L - grid.L) > 1e-12 * grid.L:
            raise ValueError("kernel cache was built for a different box size")
        self.cache = cache
        self.grid = grid
        self.sgrid = SpectralGrid(grid)
        self.truncation = float(truncation)
        ax = self.sgrid.axis
        xn = np.sqrt(ax[:, None, None] ** 2 + ax[None, :, None] ** 2
                     + ax[None, None, :] ** 2)
        # dimensionless loss profile J(|x|)/R^(lam+3) over the lattice
        from .kernel import _J_dimless
        self._jtab = _J_dimless(cache, xn * cache.R)
        self._scale = self.sgrid.h ** 3 / _TWO_PI_32

    def qhat(self, fh: GridFunction, gh: GridFunction) -> GridFunction:
        fh.require(FOURIER)
        gh.require(FOURIER)
        if fh.grid is not self.grid and (fh.grid.N, fh.grid.L) != (self.grid.N, self.grid.L):
            raise ValueError("grid mismatch between operator and inputs")
        c = self.cache
        tau = self.truncation
        gcut2 = (tau * np.max(np.abs(gh.values))) ** 2
        fcut2 = (tau * np.max(np.abs(fh.values))) ** 2
        out = _qhat_kernel(
            fh.values, gh.values, self._jtab, self.sgrid.axis,
            c.spec.beta, c.R, c.kt, c.st, 1.0 / c.dx,
            1.0 / (c.spec.lam + 3.0),
            c.prefactor * c.scale, self._scale, gcut2, fcut2)
        return GridFunction(self.grid, out, FOURIER)


_op_cache: dict = {}


def get_operator(cache: KernelCache, grid: VelocityGrid,
                 truncation: float = 0.0) -> CollisionOperator:
    key = (id(cache), grid.N, grid.L, truncation)
    op = _op_cache.get(key)
    if op is None:
        op = _op_cache[key] = CollisionOperator(cache, grid, truncation)
    return op


def collide_fourier(fh: GridFunction, gh: GridFunction, cache: KernelCache,
                    truncation: float = 0.0) -> GridFunction:
    """Qh(f, g) on the Fourier lattice."""
    return get_operator(cache, fh.grid, truncation).qhat(fh, gh)


def collide(f: GridFunction, g: GridFunction, cache: KernelCache,
            truncation: float = 0.0) -> GridFunction:
    """Q(f, g) as a velocity-space field (transform, convolve, invert)."""
    sgrid = SpectralGrid(f.grid)
    tr = get_transform(sgrid)
    qh = collide_fourier(tr.to_fourier(f), tr.to_fourier(g), cache, truncation)
    return tr.from_fourier(qh, max_residue=1.0)


# ---------------------------------------------------------------------------
# brute-force oracle


def _dense_dft_mats(grid: VelocityGrid):
    sgrid = SpectralGrid(grid)
    E = np.exp(-1j * np.outer(sgrid.axis, grid.axis))  # (k, j)
    return E, sgrid


def _dense_to_fourier(values, E, h):
    out = np.einsum("ka,lb,mc,abc->klm", E, E, E, values.astype(complex))
    return out * (h ** 3 / _TWO_PI_32)


def _dense_from_fourier(values, E, hz):
    Ei = np.conj(E).T  # (j, k)
    out = np.einsum("ak,bl,cm,klm->abc", Ei, Ei, Ei, values)
    return out * (hz ** 3 / _TWO_PI_32)


def collide_direct_oracle(f: GridFunction, g: GridFunction, spec: KernelSpec,
                          grid: VelocityGrid, R: float = None) -> GridFunction:
    """Independent re-derivation of collide() for N <= 12.

    Dense DFT matrices instead of FFTs, per-pair radial quadrature instead
    of interpolation tables, flat numpy double sums instead of the compiled
    loop.  Cost is Theta(N^6) in memory-heavy numpy; refuse larger N.
    """
    if grid.N > 12:
        raise ValueError(f"direct oracle limited to N <= 12, got N={grid.N}")
    E, sgrid = _dense_dft_mats(grid)
    fh = _dense_to_fourier(f.values, E, grid.h)
    gh = _dense_to_fourier(g.values, E, grid.h)

    N = grid.N
    ax = sgrid.axis
    Z = np.stack(np.meshgrid(ax, ax, ax, indexing="ij"), axis=-1).reshape(-1, 3)
    M = N ** 3
    if R is None:
        R = float(grid.L)  # same inscribed-ball truncation as build_cache
    b = spec.beta
    # radial arguments for every (x_i, z_k) pair
    a_k = 0.5 * b * np.linalg.norm(Z, axis=1)                    # (M,)
    diff = Z[:, None, :] - 0.5 * b * Z[None, :, :]               # (i, k, 3)
    b_ik = np.linalg.norm(diff, axis=2)
    xi_n = np.linalg.norm(Z, axis=1)
    gain = radial_integral_direct(spec.lam, R,
                                  np.broadcast_to(a_k[None, :], (M, M)), b_ik)
    loss = radial_integral_direct(spec.lam, R, xi_n)
    Ghat = 16.0 * np.pi ** 2 * spec.C * (gain - loss[:, None])   # (i, k)

    # index of z_k - x_i on the flat lattice, -1 when it leaves the box
    idx = np.arange(N)
    shift = idx[None, :] - idx[:, None] + N // 2                 # (i1, k1)
    valid1 = (shift >= 0) & (shift < N)
    shiftc = np.clip(shift, 0, N - 1)

    def flat3(per_axis):
        return (per_axis[:, None, None, :, None, None] * N * N
                + per_axis[None, :, None, None, :, None] * N
                + per_axis[None, None, :, None, None, :])

    sidx = flat3(np.broadcast_to(shiftc, (N, N))).reshape(M, M)
    vmask = (valid1[:, None, None, :, None, None]
             & valid1[None, :, None, None, :, None]
             & valid1[None, None, :, None, None, :]).reshape(M, M)
    fh_flat = fh.reshape(-1)
    gh_flat = gh.reshape(-1)
    terms = np.where(vmask, fh_flat[sidx], 0.0) * gh_flat[:, None] * Ghat
    qh = terms.sum(axis=0) * (sgrid.h ** 3 / _TWO_PI_32)

    out = _dense_from_fourier(qh.reshape(N, N, N), E, sgrid.h)
    return GridFunction(grid, np.ascontiguousarray(out.real), "velocity")
