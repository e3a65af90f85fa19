"""Time integration with per-stage conservation projection.

Forward Euler:   f^{n+1} = P(f^n + dt k1)
Midpoint RK2:    fm = P(f^n + dt/2 k1),  f^{n+1} = P(f^n + dt k(fm))

P is the moment projection (identity when conserve.mode = none); applying
it after every stage keeps each stage feasible.  ``run_scenario`` drives a
validated config to completion and records observables.
"""

from dataclasses import dataclass, field

import numpy as np

from .conserve import ConstraintSystem, apply_projector, project
from .grid import VELOCITY, GridFunction, SpectralGrid, VelocityGrid, \
    quadrature_weights
from .kernel import KernelSpec, build_cache
from .observables import MomentSet, compute_moments, raw_moment
from .sources import RightHandSide, SourceSpec, ThermostatSchedule


class ScenarioAbort(RuntimeError):
    """Raised when a step produces non-finite values; carries the last
    valid state and the partial result for post-mortem output."""

    def __init__(self, message, result=None, state=None):
        super().__init__(message)
        self.result = result
        self.state = state


def _projected(f: GridFunction, sys) -> tuple:
    if sys is None:
        return f, 0.0
    out = project(sys, f)
    corr = float(np.max(np.abs(out.values - f.values)))
    return out, corr


def _check_finite(values, where):
    if not np.all(np.isfinite(values)):
        raise FloatingPointError(f"non-finite values after {where}")


def step_euler(f: GridFunction, t: float, dt: float, rhs, sys=None, k1=None):
    """One projected Euler step; returns (f_new, correction inf-norm)."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if k1 is None:
        k1 = rhs(f, t)
    ft = GridFunction(f.grid, f.values + dt * k1.values, VELOCITY)
    _check_finite(ft.values, f"euler step at t={t}")
    return _projected(ft, sys)


def step_rk2(f: GridFunction, t: float, dt: float, rhs, sys=None, k1=None):
    """One projected midpoint-RK2 step; returns (f_new, correction norm)."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if k1 is None:
        k1 = rhs(f, t)
    mid = GridFunction(f.grid, f.values + 0.5 * dt * k1.values, VELOCITY)
    _check_finite(mid.values, f"rk2 half stage at t={t}")
    mid, _ = _projected(mid, sys)
    k2 = rhs(mid, t + 0.5 * dt)
    out = GridFunction(f.grid, f.values + dt * k2.values, VELOCITY)
    _check_finite(out.values, f"rk2 step at t={t}")
    return _projected(out, sys)


_STEPPERS = {"euler": step_euler, "rk2": step_rk2}


@dataclass
class ScenarioResult:
    """Everything a scenario run produces, in memory."""

    config: object
    grid: VelocityGrid
    weights: np.ndarray
    series: list = field(default_factory=list)          # MomentSet per record
    mq_raw: dict = field(default_factory=dict)          # q -> list of raw moments
    snapshots: dict = field(default_factory=dict)       # t -> GridFunction
    f_final: GridFunction = None

    @property
    def times(self):
        return np.array([ms.t for ms in self.series])


def collision_frequency_scale(rho0: float, spec: KernelSpec, T0: float) -> float:
    """rho * C * 4pi * (thermal speed)^lam, the rate the default dt targets."""
    return rho0 * spec.C * 4.0 * np.pi * np.sqrt(max(T0, 0.0)) ** spec.lam


def run_scenario(config, f0: GridFunction = None) -> ScenarioResult:
    """Advance a validated ScenarioConfig to t_final, recording moments
    every ``record_stride`` steps and snapshots at the listed times."""
    from .cli import initial_state  # deferred: cli owns scenario defaults

    grid = VelocityGrid(config.N, config.L)
    if f0 is None:
        f0 = initial_state(config, grid)
    w = quadrature_weights(grid)
    spec = KernelSpec(lam=config.lam, e=config.e, C=config.C)
    cache = build_cache(spec, grid, M_r=config.table_resolution)

    cache_linear = None
    source = _build_source(config)
    if source.kind == "thermostat" and (spec.lam != 0.0 or spec.e != 1.0):
        cache_linear = build_cache(KernelSpec(lam=0.0, e=1.0, C=config.C),
                                   grid, M_r=config.table_resolution)
    rhs = RightHandSide(cache, source, cache_linear=cache_linear,
                        truncation=config.truncation)

    sys = None
    if config.conserve_mode != "none":
        from .conserve import build_constraints, constraint_rows
        C = constraint_rows(grid, w, config.conserve_mode)
        targets = C @ f0.values.reshape(-1)
        sys = build_constraints(grid, w, config.conserve_mode, targets)

    ms0 = compute_moments(f0, w, config.t_offset)
    dt = config.dt
    if dt is None:
        dt = 0.1 / collision_frequency_scale(ms0.rho, spec, ms0.T)
    n_steps = int(round(config.t_final / dt))
    stepper = _STEPPERS[config.integrator]

    snap_steps = {int(round(ts / dt)): ts for ts in config.snapshot_times}
    result = ScenarioResult(config=config, grid=grid, weights=w)

    f = f0
    last_corr = 0.0
    try:
        for n in range(n_steps + 1):
            t = n * dt
            record = (n % config.record_stride == 0) or n == n_steps
            k1 = rhs(f, t) if (record or n in snap_steps) else None
            if record:
                flatk = k1.values.reshape(-1)
                stat = float(np.max(np.abs(
                    apply_projector(sys, flatk) if sys is not None else flatk)))
                result.series.append(compute_moments(
                    f, w, t + config.t_offset, corr=last_corr,
                    stationarity=stat))
                for q in config.mq_orders:
                    result.mq_raw.setdefault(q, []).append(raw_moment(f, w, q))
            if n in snap_steps:
                result.snapshots[snap_steps[n]] = f.copy()
            if n == n_steps:
                break
            f, last_corr = stepper(f, t, dt, rhs, sys, k1=k1)
    except (FloatingPointError, ValueError) as exc:
        result.f_final = f
        raise ScenarioAbort(f"scenario aborted after t={n * dt:.6g}: {exc}",
                            result=result, state=f) from exc
    result.f_final = f
    return result


def _build_source(config) -> SourceSpec:
    kind = config.source_kind
    if kind == "none":
        return SourceSpec(kind="none", zeta_prefactor=config.zeta_prefactor)
    if kind == "diffusion":
        return SourceSpec(kind="diffusion", mu_diff=config.mu_diff,
                          zeta_prefactor=config.zeta_prefactor)
    if kind == "thermostat":
        if config.thermostat_kind == "constant":
            sched = ThermostatSchedule(kind="constant", T=config.thermostat_T)
        else:
            sched = ThermostatSchedule(kind="decaying",
                                       zeta0=config.thermostat_zeta0,
                                       alpha=config.thermostat_alpha)
        return SourceSpec(kind="thermostat", theta=config.theta,
                          schedule=sched, zeta_prefactor=config.zeta_prefactor)
    raise ValueError(f"unknown source kind {kind!r}")
