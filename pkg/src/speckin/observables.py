"""Moments, temperature, flows and slice extraction.

Definitions (k = 1, d = 3):

    rho = sum w f           m_i = sum w f v_i          V = m / rho
    M2_ij = sum w f v_i v_j
    r_i = (1/2) sum w f |v|^2 v_i
    E = (tr M2 - rho |V|^2) / (2 rho)      T = 2 E / 3
"""

from dataclasses import dataclass, field

import numpy as np

from .grid import VELOCITY, GridFunction


@dataclass
class MomentSet:
    """Snapshot of the standard observables at one time."""

    t: float
    rho: float
    m: np.ndarray           # momentum 3-vector
    M2: np.ndarray          # 3x3 momentum-flow tensor
    r: np.ndarray           # energy-flow 3-vector
    min_f: float
    corr: float = 0.0       # last projection correction inf-norm
    stationarity: float = 0.0  # |Lambda Q|_inf at this step

    @property
    def V(self):
        return self.m / self.rho

    @property
    def E(self):
        return (np.trace(self.M2) - self.rho * np.sum(self.V ** 2)) / (2.0 * self.rho)

    @property
    def T(self):
        return 2.0 * self.E / 3.0

    def row(self):
        """Values in the moments.csv column order."""
        return ([self.t, self.rho] + list(self.m) + list(self.V)
                + [self.M2[0, 0], self.M2[0, 1], self.M2[0, 2],
                   self.M2[1, 1], self.M2[1, 2], self.M2[2, 2]]
                + list(self.r) + [self.E, self.T, self.min_f, self.corr,
                                  self.stationarity])


MOMENT_COLUMNS = ["t", "rho", "mx", "my", "mz", "Vx", "Vy", "Vz",
                  "M11", "M12", "M13", "M22", "M23", "M33",
                  "r1", "r2", "r3", "E", "T", "min_f", "corr_norm",
                  "stationarity_norm"]


def compute_moments(f: GridFunction, w: np.ndarray, t: float,
                    corr: float = 0.0, stationarity: float = 0.0) -> MomentSet:
    """All observables by weighted sums; rejects non-positive density."""
    f.require(VELOCITY)
    wf = w * f.values
    rho = float(wf.sum())
    if rho <= 0.0:
        raise ValueError(f"invalid state: non-positive density rho = {rho}")
    V1, V2, V3 = f.grid.meshgrid()
    vs = (V1, V2, V3)
    m = np.array([float((wf * v).sum()) for v in vs])
    M2 = np.empty((3, 3))
    for i in range(3):
        for j in range(i, 3):
            M2[i, j] = M2[j, i] = float((wf * vs[i] * vs[j]).sum())
    sq = V1 * V1 + V2 * V2 + V3 * V3
    r = np.array([0.5 * float((wf * sq * v).sum()) for v in vs])
    return MomentSet(t=float(t), rho=rho, m=m, M2=M2, r=r,
                     min_f=float(f.values.min()), corr=corr,
                     stationarity=stationarity)


def raw_moment(f: GridFunction, w: np.ndarray, q: float) -> float:
    """sum_j w_j f_j |v_j|^(2q), the unrescaled isotropic moment."""
    if q < 0:
        raise ValueError(f"moment order q must be >= 0, got {q}")
    V1, V2, V3 = f.grid.meshgrid()
    sq = V1 * V1 + V2 * V2 + V3 * V3
    return float((w * f.values * sq ** q).sum())


def rescaled_moment(f: GridFunction, w: np.ndarray, q: float, t: float,
                    mu1: float = 2.0 / 3.0) -> float:
    """e^(-q mu1 t) * sum w f |v|^(2q).

    With mu1 equal to the energy dissipation rate this compensates
    self-similar heating; on a cooling solution pass the negative rate to
    undo the contraction instead.
    """
    return float(np.exp(-q * mu1 * t)) * raw_moment(f, w, q)


_AXES = {"x": 0, "y": 1, "z": 2}


def axis_slice(f: GridFunction, axis: str = "x"):
    """1-D profile through the grid center line: returns (v, f) arrays."""
    f.require(VELOCITY)
    try:
        ax = _AXES[axis]
    except KeyError:
        raise ValueError(f"axis must be one of {sorted(_AXES)}, got {axis!r}")
    c = f.grid.N // 2  # index of v = 0
    idx = [c, c, c]
    idx[ax] = slice(None)
    return f.grid.axis.copy(), np.ascontiguousarray(f.values[tuple(idx)])


def self_similar_rescale_points(speeds, t: float, mu1: float = 2.0 / 3.0):
    """Map grid speeds into the self-similar variable.

    Returns (|v| e^(mu1 t / 2), e^(3 mu1 t / 2)): evaluate the computed f
    at the grid speeds, multiply by the amplitude, and compare against the
    limit profile at the rescaled speeds.
    """
    speeds = np.asarray(speeds, dtype=float)
    scale = np.exp(0.5 * mu1 * t)
    return speeds * scale, float(scale ** 3)
