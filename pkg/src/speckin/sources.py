"""Heating sources and right-hand-side assembly.

Two sources are supported on top of the collision operator:

  diffusion   G(f) = mu * Laplacian(f), spectrally  -mu |z|^2 fh
  thermostat  Theta * Q(f, M_T(t)): the linear slow-down operator realized
              through the elastic (beta = 1, lam = 0) bilinear collision
              path with the second argument frozen at the background
              Maxwellian of temperature T(t)

The full right-hand side zeta * Q(f, f) + source is assembled in Fourier
space and inverted once per evaluation.
"""

from dataclasses import dataclass, field

import numpy as np

from .collision import collide_fourier
from .grid import FOURIER, GridFunction, SpectralGrid, maxwellian, sample
from .kernel import KernelCache
from .transform import get_transform

_TWO_PI_32 = (2.0 * np.pi) ** 1.5

# coarse-grid collision inversions carry a spectrally small non-Hermitian
# part (see transform.from_fourier); this is the rhs-path ceiling
RHS_MAX_RESIDUE = 1.0


@dataclass(frozen=True)
class ThermostatSchedule:
    """Background temperature law: constant T or zeta0 * e^(-alpha t)."""

    kind: str = "constant"
    T: float = 1.0
    zeta0: float = 0.25
    alpha: float = 2.0 / 3.0

    def __post_init__(self):
        if self.kind not in ("constant", "decaying"):
            raise ValueError(f"schedule kind must be constant|decaying, got {self.kind!r}")
        if self.kind == "constant" and self.T < 0:
            raise ValueError("constant thermostat temperature must be >= 0")
        if self.kind == "decaying" and (self.zeta0 < 0 or self.alpha < 0):
            raise ValueError("decaying schedule needs zeta0 >= 0 and alpha >= 0")

    def value(self, t: float) -> float:
        if self.kind == "constant":
            return self.T
        return self.zeta0 * float(np.exp(-self.alpha * t))


@dataclass(frozen=True)
class SourceSpec:
    """Source selection plus the optional collision-rate prefactor zeta."""

    kind: str = "none"
    mu_diff: float = 0.0
    theta: float = 4.0 / 3.0
    schedule: ThermostatSchedule = field(default_factory=ThermostatSchedule)
    zeta_prefactor: float = 1.0

    def __post_init__(self):
        if self.kind not in ("none", "diffusion", "thermostat"):
            raise ValueError(
                f"source.kind must be none|diffusion|thermostat, got {self.kind!r}")
        if self.kind == "diffusion" and not self.mu_diff > 0:
            raise ValueError("diffusion source needs mu_diff > 0")
        if self.kind == "thermostat":
            if not self.theta > 0:
                raise ValueError("thermostat source needs theta > 0")
            if self.schedule is None:
                raise ValueError("thermostat source needs a schedule")


def apply_diffusion(fh: GridFunction, mu_diff: float) -> GridFunction:
    """Spectral Laplacian contribution -mu |z_k|^2 fh(z_k)."""
    fh.require(FOURIER)
    sgrid = SpectralGrid(fh.grid)
    ax = sgrid.axis
    sq = (ax[:, None, None] ** 2 + ax[None, :, None] ** 2
          + ax[None, None, :] ** 2)
    return GridFunction(fh.grid, -mu_diff * sq * fh.values, FOURIER)


def maxwellian_hat(sgrid: SpectralGrid, T: float) -> GridFunction:
    """Fourier field of the centered Maxwellian.

    Above the resolvable temperature h^2 the grid-sampled Maxwellian is
    transformed (so the thermostat sees exactly what the grid represents);
    below it the analytic transform e^(-T|z|^2/2)/(2pi)^(3/2) is
    substituted, since the velocity-space sampling would be meaningless.
    """
    if T < 0:
        raise ValueError(f"thermostat temperature must be >= 0, got {T}")
    grid = sgrid.velocity
    if T >= grid.h ** 2:
        return get_transform(sgrid).to_fourier(sample(grid, maxwellian(T)))
    ax = sgrid.axis
    sq = (ax[:, None, None] ** 2 + ax[None, :, None] ** 2
          + ax[None, None, :] ** 2)
    vals = np.exp(-0.5 * T * sq) / _TWO_PI_32
    return GridFunction(grid, vals.astype(complex), FOURIER)


def thermostat_operator(f: GridFunction, schedule: ThermostatSchedule,
                        t: float, cache_linear: KernelCache,
                        truncation: float = 0.0) -> GridFunction:
    """Q(f, M_T(t)) via the elastic bilinear path; velocity-space output."""
    sgrid = SpectralGrid(f.grid)
    tr = get_transform(sgrid)
    gh = maxwellian_hat(sgrid, schedule.value(t))
    qh = collide_fourier(tr.to_fourier(f), gh, cache_linear, truncation)
    return tr.from_fourier(qh, max_residue=RHS_MAX_RESIDUE)


class RightHandSide:
    """Callable (f, t) -> zeta Q(f,f) + source, one Fourier round trip."""

    def __init__(self, cache: KernelCache, source: SourceSpec,
                 cache_linear: KernelCache = None, truncation: float = 0.0):
        self.cache = cache
        self.source = source
        self.truncation = truncation
        if source.kind == "thermostat":
            if cache_linear is None:
                spec = cache.spec
                if spec.lam == 0.0 and spec.e == 1.0:
                    cache_linear = cache
                else:
                    raise ValueError("thermostat source needs an elastic "
                                     "Maxwell kernel cache (cache_linear)")
            ls = cache_linear.spec
            if ls.lam != 0.0 or ls.e != 1.0:
                raise ValueError("cache_linear must be lam=0, e=1")
        self.cache_linear = cache_linear
        self._mhat = {}  # T -> cached background transform

    def _background(self, sgrid, T):
        key = round(T, 14)
        gh = self._mhat.get(key)
        if gh is None:
            if len(self._mhat) > 64:
                self._mhat.clear()
            gh = self._mhat[key] = maxwellian_hat(sgrid, T)
        return gh

    def __call__(self, f: GridFunction, t: float) -> GridFunction:
        sgrid = SpectralGrid(f.grid)
        tr = get_transform(sgrid)
        fh = tr.to_fourier(f)
        qh = collide_fourier(fh, fh, self.cache, self.truncation)
        total = self.source.zeta_prefactor * qh.values
        if self.source.kind == "diffusion":
            total = total + apply_diffusion(fh, self.source.mu_diff).values
        elif self.source.kind == "thermostat":
            T = self.source.schedule.value(t)
            gh = self._background(sgrid, T)
            lin = collide_fourier(fh, gh, self.cache_linear, self.truncation)
            total = total + self.source.theta * lin.values
        out = GridFunction(f.grid, total, FOURIER)
        return tr.from_fourier(out, max_residue=RHS_MAX_RESIDUE)
