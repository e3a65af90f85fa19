"""Deterministic spectral solver for space-homogeneous kinetic equations."""

from .grid import (FOURIER, VELOCITY, GridFunction, SpectralGrid, VelocityGrid,
                   build_grids, maxwellian, quadrature_weights, sample)
from .collision import CollisionOperator, collide, collide_direct_oracle, \
    get_operator
from .conserve import ConstraintSystem, build_constraints, constraint_rows, \
    project, projection_operator_checks
from .kernel import KernelCache, KernelSpec, build_cache, eval_G, eval_G_hat
from .observables import MomentSet, axis_slice, compute_moments, raw_moment, \
    rescaled_moment
from .sources import RightHandSide, SourceSpec, ThermostatSchedule
from .stepper import ScenarioAbort, ScenarioResult, run_scenario, step_euler, \
    step_rk2
from .transform import SpectralTransform, from_fourier, get_transform, to_fourier

__version__ = "0.1.0"

__all__ = [
    "VELOCITY", "FOURIER", "VelocityGrid", "SpectralGrid", "GridFunction",
    "build_grids", "sample", "quadrature_weights", "maxwellian",
    "SpectralTransform", "get_transform", "to_fourier", "from_fourier",
    "KernelSpec", "KernelCache", "build_cache", "eval_G", "eval_G_hat",
    "CollisionOperator", "get_operator", "collide", "collide_direct_oracle",
    "ConstraintSystem", "constraint_rows", "build_constraints", "project",
    "projection_operator_checks",
    "MomentSet", "compute_moments", "raw_moment", "rescaled_moment",
    "axis_slice",
    "SourceSpec", "ThermostatSchedule", "RightHandSide",
    "ScenarioAbort", "ScenarioResult", "run_scenario", "step_euler",
    "step_rk2",
    "__version__",
]
