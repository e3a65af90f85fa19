"""Constrained moment projection.

The discrete collision output drifts off the conserved moments; the fix is
the least-squares correction

    f = ft + C^T (C C^T)^{-1} (a - C ft)

whose associated projector Lambda = I - C^T (C C^T)^{-1} C is applied
implicitly (the n_c x n_c system is factored once, never the big one).
Constraint rows are the weighted collision invariants: mass, momentum and,
for elastic collisions, energy.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .grid import VELOCITY, GridFunction, VelocityGrid

# mode -> number of constraint rows (mass; +momentum; +energy)
MODES = {"elastic": 5, "inelastic": 4, "linear": 1}


@dataclass(frozen=True)
class ConstraintSystem:
    """Assembled constraint rows, targets and the factored normal matrix."""

    mode: str
    grid: VelocityGrid
    C: np.ndarray          # (n_c, N^3)
    a: np.ndarray          # (n_c,)
    factor: tuple          # cho_factor of C C^T

    @property
    def n_c(self):
        return self.C.shape[0]

    def moments(self, f: GridFunction) -> np.ndarray:
        """C f for a velocity-space field."""
        return self.C @ f.values.reshape(-1)


def constraint_rows(grid: VelocityGrid, weights: np.ndarray, mode: str) -> np.ndarray:
    if mode not in MODES:
        raise ValueError(f"conserve.mode must be one of {sorted(MODES)}, got {mode!r}")
    w = weights.reshape(-1)
    rows = [w]
    if mode in ("elastic", "inelastic"):
        V1, V2, V3 = (a.reshape(-1) for a in grid.meshgrid())
        rows += [w * V1, w * V2, w * V3]
        if mode == "elastic":
            rows.append(w * (V1 * V1 + V2 * V2 + V3 * V3))
    return np.array(rows)


def build_constraints(grid: VelocityGrid, weights: np.ndarray, mode: str,
                      targets: np.ndarray) -> ConstraintSystem:
    """Assemble C for the mode and factor C C^T (must be SPD)."""
    C = constraint_rows(grid, weights, mode)
    a = np.asarray(targets, dtype=float).reshape(-1)
    if a.size != C.shape[0]:
        raise ValueError(f"mode {mode!r} needs {C.shape[0]} targets, got {a.size}")
    gram = C @ C.T
    try:
        factor = cho_factor(gram)
    except LinAlgError as exc:
        raise ValueError(f"C C^T not positive definite (degenerate grid): {exc}")
    return ConstraintSystem(mode=mode, grid=grid, C=C, a=a.copy(), factor=factor)


def project(sys: ConstraintSystem, ft: GridFunction) -> GridFunction:
    """Minimal-L2 correction of ft onto the constraint set C f = a."""
    ft.require(VELOCITY)
    flat = ft.values.reshape(-1)
    resid = sys.a - sys.C @ flat
    mult = cho_solve(sys.factor, resid)
    out = flat + sys.C.T @ mult
    return GridFunction(ft.grid, out.reshape(ft.values.shape), VELOCITY)


def apply_projector(sys: ConstraintSystem, x: np.ndarray) -> np.ndarray:
    """Lambda x = x - C^T (C C^T)^{-1} C x on a flat vector (zero targets)."""
    return x - sys.C.T @ cho_solve(sys.factor, sys.C @ x)


def projection_operator_checks(sys: ConstraintSystem, n_random: int = 10,
                               seed: int = 0) -> dict:
    """Verify Lambda^2 = Lambda, C Lambda = 0 and symmetry on random vectors."""
    rng = np.random.default_rng(seed)
    M = sys.C.shape[1]
    idem = annihilation = symmetry = 0.0
    for _ in range(n_random):
        x = rng.standard_normal(M)
        x /= np.linalg.norm(x)
        y = rng.standard_normal(M)
        y /= np.linalg.norm(y)
        lx = apply_projector(sys, x)
        ly = apply_projector(sys, y)
        idem = max(idem, np.max(np.abs(apply_projector(sys, lx) - lx)))
        annihilation = max(annihilation, np.max(np.abs(sys.C @ lx)))
        symmetry = max(symmetry, abs(lx @ y - x @ ly))
    report = {"idempotence": idem, "annihilation": annihilation,
              "symmetry": symmetry}
    report["pass"] = all(v <= 1e-12 for k, v in report.items() if k != "pass")
    return report
