"""Uniform velocity / Fourier lattices and the sampled-field container.

The velocity domain is the half-open cube [-L, L)^3 with N points per axis,
v_j = -L + j*h.  The dual Fourier lattice uses the same N with spacing
h_z such that h*h_z = 2*pi/N, so the discrete transform pair is exact.
"""

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class VelocityGrid:
    """Uniform centered lattice on [-L, L)^3."""

    N: int
    L: float

    d: int = 3

    def __post_init__(self):
        if self.N % 2 != 0 or self.N < 4:
            raise ValueError(f"grid.N must be an even integer >= 4, got {self.N}")
        if not self.L > 0:
            raise ValueError(f"grid.L must be positive, got {self.L}")

    @property
    def h(self):
        return 2.0 * self.L / self.N

    @property
    def axis(self):
        """1-D node coordinates, identical for x, y, z."""
        return -self.L + self.h * np.arange(self.N)

    def meshgrid(self):
        """(vx, vy, vz) arrays of shape (N, N, N), row-major over (x, y, z)."""
        a = self.axis
        return np.meshgrid(a, a, a, indexing="ij")

    @property
    def size(self):
        return self.N**3


@dataclass(frozen=True)
class SpectralGrid:
    """Fourier lattice dual to a VelocityGrid: h * h_z = 2*pi/N exactly."""

    velocity: VelocityGrid

    @property
    def N(self):
        return self.velocity.N

    @property
    def h(self):
        return 2.0 * np.pi / (self.N * self.velocity.h)

    @property
    def L(self):
        return self.N * self.h / 2.0

    @property
    def axis(self):
        return -self.L + self.h * np.arange(self.N)

    def meshgrid(self):
        a = self.axis
        return np.meshgrid(a, a, a, indexing="ij")

    def radius_grid(self):
        """|zeta| at every node, shape (N, N, N)."""
        zx, zy, zz = self.meshgrid()
        return np.sqrt(zx**2 + zy**2 + zz**2)


VELOCITY = "velocity"
FOURIER = "fourier"


@dataclass
class GridFunction:
    """Scalar field sampled on the lattice: real in velocity space,
    complex in Fourier space."""

    grid: VelocityGrid
    values: np.ndarray
    space: str = VELOCITY

    def __post_init__(self):
        n = self.grid.N
        if self.values.shape != (n, n, n):
            raise ValueError(
                f"values shape {self.values.shape} does not match grid N={n}")
        if self.space not in (VELOCITY, FOURIER):
            raise ValueError(f"unknown space tag {self.space!r}")

    def require(self, space):
        if self.space != space:
            raise ValueError(f"expected a {space}-space field, got {self.space}")
        return self

    def check_finite(self):
        if not np.all(np.isfinite(self.values)):
            raise FloatingPointError("grid function contains non-finite values")
        return self

    def copy(self):
        return GridFunction(self.grid, self.values.copy(), self.space)


def build_grids(N, L):
    """Construct the dual (velocity, Fourier) lattice pair."""
    vgrid = VelocityGrid(int(N), float(L))
    return vgrid, SpectralGrid(vgrid)


def sample(grid, density):
    """Sample a closed-form density f(vx, vy, vz) onto the lattice.

    The callable must accept three (N,N,N) coordinate arrays (any numpy
    ufunc expression works) and return finite values everywhere.
    """
    vx, vy, vz = grid.meshgrid()
    vals = np.asarray(density(vx, vy, vz), dtype=float)
    if vals.shape != vx.shape:
        vals = np.broadcast_to(vals, vx.shape).copy()
    out = GridFunction(grid, vals, VELOCITY)
    out.check_finite()
    return out


def quadrature_weights(grid):
    """Tensor-product trapezoid weights for the half-open box [-L, L)^3.

    The right endpoint v = L is absent from the lattice, so only j = 0
    carries the trapezoid half-weight; every other node gets the full h.
    """
    w1 = np.full(grid.N, grid.h)
    w1[0] = 0.5 * grid.h
    return w1[:, None, None] * w1[None, :, None] * w1[None, None, :]


def maxwellian(T, V=(0.0, 0.0, 0.0), rho=1.0):
    """Closed-form Maxwellian density with temperature T and mean V."""
    V = np.asarray(V, dtype=float)
    norm = rho / (2.0 * np.pi * T) ** 1.5

    def f(vx, vy, vz):
        q = (vx - V[0]) ** 2 + (vy - V[1]) ** 2 + (vz - V[2]) ** 2
        return norm * np.exp(-q / (2.0 * T))

    return f
