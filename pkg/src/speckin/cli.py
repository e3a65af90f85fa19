"""Command-line front end: flat-file configs, scenario runs, CSV artifacts.

Config files are plain ``key = value`` lines with ``#`` comments.  The
``scenario`` key selects a benchmark preset; every other key overrides the
preset's default.  Unknown keys are errors.
"""

import argparse
import csv
import os
import sys
from dataclasses import dataclass, field, replace

import numpy as np

from .grid import GridFunction, VELOCITY, VelocityGrid, maxwellian, sample
from .observables import MOMENT_COLUMNS, axis_slice, rescaled_moment
from .reference import (T0_BKW, bkw_exact, diffusion_temperature_exact,
                        inelastic_energy_exact, maxwell_second_moment_exact,
                        self_similar_F)

SCENARIOS = ("maxwell-elastic", "bkw", "hard-sphere-elastic", "inelastic",
             "inelastic-diffusion", "slowdown-const-T", "slowdown-decaying-T")


@dataclass(frozen=True)
class ScenarioConfig:
    """Fully resolved, validated run parameters (deterministic, seed-free)."""

    scenario: str
    N: int = 24
    L: float = 8.0
    lam: float = 0.0
    e: float = 1.0
    C: float = 1.0 / (4.0 * np.pi)
    table_resolution: int = 256
    truncation: float = 0.0
    source_kind: str = "none"
    mu_diff: float = 0.0
    theta: float = 4.0 / 3.0
    thermostat_kind: str = "constant"
    thermostat_T: float = 1.0
    thermostat_alpha: float = 2.0 / 3.0
    thermostat_zeta0: float = 0.25
    zeta_prefactor: float = 1.0
    conserve_mode: str = "elastic"
    dt: float = None            # None -> 0.1 / collision frequency
    t_final: float = 5.0
    integrator: str = "rk2"
    t_offset: float = 0.0
    init_T: float = 2.0
    out_dir: str = "out"
    record_stride: int = 1
    snapshot_times: tuple = ()
    mq_orders: tuple = ()


_DEFAULTS = {
    "maxwell-elastic": dict(N=24, L=10.0, lam=0.0, e=1.0,
                            conserve_mode="elastic", dt=0.1, t_final=5.0,
                            snapshot_times=(0.0, 5.0)),
    "hard-sphere-elastic": dict(N=24, L=8.0, lam=1.0, e=1.0,
                                conserve_mode="elastic", dt=None,
                                t_final=5.0, snapshot_times=(0.0, 5.0)),
    "bkw": dict(N=32, L=5.0, lam=0.0, e=1.0, conserve_mode="elastic",
                dt=0.01, t_final=2.0, t_offset=T0_BKW, record_stride=10,
                snapshot_times=(0.0, 1.0, 2.0)),
    "inelastic": dict(N=16, L=8.0, lam=0.0, e=0.5, conserve_mode="inelastic",
                      dt=0.1, t_final=8.0, snapshot_times=(0.0, 8.0)),
    "inelastic-diffusion": dict(N=16, L=7.0, lam=0.0, e=0.5,
                                conserve_mode="inelastic",
                                source_kind="diffusion", mu_diff=0.09375,
                                dt=0.1, t_final=37.0, init_T=2.0,
                                record_stride=5, snapshot_times=(0.0, 37.0)),
    "slowdown-const-T": dict(N=24, L=6.0, lam=0.0, e=1.0,
                             conserve_mode="linear", source_kind="thermostat",
                             thermostat_kind="constant", thermostat_T=1.0,
                             theta=4.0 / 3.0, dt=0.1, t_final=12.0,
                             init_T=2.0, record_stride=5,
                             snapshot_times=(8.0, 10.0, 12.0)),
    "slowdown-decaying-T": dict(N=26, L=5.0, lam=0.0, e=1.0,
                                conserve_mode="linear",
                                source_kind="thermostat",
                                thermostat_kind="decaying",
                                thermostat_zeta0=0.25,
                                thermostat_alpha=2.0 / 3.0,
                                theta=4.0 / 3.0, dt=0.05, t_final=3.15,
                                init_T=1.0, record_stride=4,
                                snapshot_times=(0.0, 3.15),
                                mq_orders=(1.0, 1.3, 1.45, 1.5, 1.55,
                                           1.7, 2.0)),
}

# config-file key -> (attribute, parser)
def _floats(s):
    return tuple(float(x) for x in s.split(",") if x.strip())


_KEYS = {
    "scenario": ("scenario", str),
    "grid.N": ("N", int),
    "grid.L": ("L", float),
    "kernel.lambda": ("lam", float),
    "kernel.e": ("e", float),
    "kernel.C_lambda": ("C", float),
    "kernel.table_resolution": ("table_resolution", int),
    "kernel.truncation": ("truncation", float),
    "source.kind": ("source_kind", str),
    "source.mu_diff": ("mu_diff", float),
    "source.theta": ("theta", float),
    "source.thermostat_kind": ("thermostat_kind", str),
    "source.thermostat_T": ("thermostat_T", float),
    "source.thermostat_alpha": ("thermostat_alpha", float),
    "source.thermostat_zeta0": ("thermostat_zeta0", float),
    "source.zeta_prefactor": ("zeta_prefactor", float),
    "conserve.mode": ("conserve_mode", str),
    "time.dt": ("dt", float),
    "time.t_final": ("t_final", float),
    "time.integrator": ("integrator", str),
    "init.T": ("init_T", float),
    "output.dir": ("out_dir", str),
    "output.record_stride": ("record_stride", int),
    "output.snapshot_times": ("snapshot_times", _floats),
    "output.mq_orders": ("mq_orders", _floats),
}


class ConfigError(ValueError):
    pass


def _parse_pairs(lines, origin):
    pairs = {}
    for ln, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{origin}:{ln}: expected 'key = value', got {raw!r}")
        key, val = (part.strip() for part in line.split("=", 1))
        if key in pairs:
            raise ConfigError(f"{origin}:{ln}: duplicate key {key!r}")
        pairs[key] = val
    return pairs


def parse_config(path=None, overrides=(), text=None) -> ScenarioConfig:
    """Build a validated ScenarioConfig from a file and/or key=value pairs."""
    pairs = {}
    if text is not None:
        pairs.update(_parse_pairs(text.splitlines(), "<inline>"))
    if path is not None:
        with open(path) as fh:
            pairs.update(_parse_pairs(fh.read().splitlines(), path))
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not key=value")
        key, val = (part.strip() for part in item.split("=", 1))
        pairs[key] = val

    if "scenario" not in pairs:
        raise ConfigError("config must set 'scenario'")
    scenario = pairs.pop("scenario")
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}; choose from {SCENARIOS}")

    fields = dict(_DEFAULTS[scenario])
    for key, val in pairs.items():
        if key not in _KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        attr, conv = _KEYS[key]
        try:
            fields[attr] = conv(val)
        except ValueError as exc:
            raise ConfigError(f"malformed value for {key!r}: {val!r} ({exc})")
    cfg = ScenarioConfig(scenario=scenario, **fields)
    _validate(cfg)
    return cfg


def _validate(cfg: ScenarioConfig):
    try:
        VelocityGrid(cfg.N, cfg.L)
    except ValueError as exc:
        raise ConfigError(f"grid.N/grid.L invalid: {exc}")
    if not 0.0 <= cfg.lam <= 1.0:
        raise ConfigError(f"kernel.lambda must be in [0, 1], got {cfg.lam}")
    if not 0.0 <= cfg.e <= 1.0:
        raise ConfigError(f"kernel.e must be in [0, 1], got {cfg.e}")
    if cfg.conserve_mode not in ("elastic", "inelastic", "linear", "none"):
        raise ConfigError(f"conserve.mode invalid: {cfg.conserve_mode!r}")
    if cfg.conserve_mode == "elastic" and cfg.e < 1.0:
        raise ConfigError(
            "conserve.mode=elastic constrains energy, which inelastic "
            f"collisions (kernel.e = {cfg.e} < 1) do not conserve; use "
            "conserve.mode=inelastic")
    if cfg.integrator not in ("euler", "rk2"):
        raise ConfigError(f"time.integrator must be euler|rk2, got {cfg.integrator!r}")
    if cfg.dt is not None and cfg.dt <= 0:
        raise ConfigError(f"time.dt must be positive, got {cfg.dt}")
    if cfg.t_final < 0:
        raise ConfigError(f"time.t_final must be >= 0, got {cfg.t_final}")
    if cfg.record_stride < 1:
        raise ConfigError(f"output.record_stride must be >= 1, got {cfg.record_stride}")
    if cfg.source_kind == "diffusion" and not cfg.mu_diff > 0:
        raise ConfigError("source.mu_diff must be positive for diffusion")
    if cfg.init_T <= 0:
        raise ConfigError(f"init.T must be positive, got {cfg.init_T}")


# ---------------------------------------------------------------------------
# initial data


def bimodal_initial(grid: VelocityGrid) -> GridFunction:
    """Equal-mass two-Gaussian datum: centers (-2,2,0) and (2,0,0), unit
    temperatures -> rho = 1, V = (0,1,0), T = 8/3."""
    f1 = maxwellian(1.0, (-2.0, 2.0, 0.0))
    f2 = maxwellian(1.0, (2.0, 0.0, 0.0))
    vx, vy, vz = grid.meshgrid()
    vals = 0.5 * f1(vx, vy, vz) + 0.5 * f2(vx, vy, vz)
    return GridFunction(grid, vals, VELOCITY)


def initial_state(cfg: ScenarioConfig, grid: VelocityGrid) -> GridFunction:
    if cfg.scenario in ("maxwell-elastic", "hard-sphere-elastic", "inelastic"):
        return bimodal_initial(grid)
    if cfg.scenario == "bkw":
        vx, vy, vz = grid.meshgrid()
        pts = np.stack([vx, vy, vz], axis=-1)
        return GridFunction(grid, bkw_exact(pts, cfg.t_offset), VELOCITY)
    # heated / thermostatted runs start from a centered Maxwellian
    return sample(grid, maxwellian(cfg.init_T))


# ---------------------------------------------------------------------------
# output


def _fmt(x):
    if isinstance(x, str):
        return x
    return repr(float(x))


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(header)
        for row in rows:
            wr.writerow([_fmt(x) for x in row])


def write_artifacts(result, out_dir: str):
    """moments.csv, slices/, and the scenario's reference report."""
    cfg = result.config
    os.makedirs(out_dir, exist_ok=True)
    _write_csv(os.path.join(out_dir, "moments.csv"), MOMENT_COLUMNS,
               [ms.row() for ms in result.series])

    slice_dir = os.path.join(out_dir, "slices")
    os.makedirs(slice_dir, exist_ok=True)
    for t, snap in sorted(result.snapshots.items()):
        v, fs = axis_slice(snap, "x")
        exact = _slice_reference(cfg, v, t)
        if exact is None:
            _write_csv(os.path.join(slice_dir, f"t{t:g}.csv"), ["v", "f"],
                       zip(v, fs))
        else:
            _write_csv(os.path.join(slice_dir, f"t{t:g}.csv"),
                       ["v", "f", "f_exact"], zip(v, fs, exact))

    if cfg.mq_orders:
        times = result.times
        header = ["t"] + [f"m_{q:g}" for q in cfg.mq_orders]
        rows = []
        for i, t in enumerate(times):
            # amplifying rescale e^{+2qt/3}: undoes the thermostat cooling
            rel = t - cfg.t_offset
            row = [t] + [result.mq_raw[q][i]
                         * np.exp(q * cfg.thermostat_alpha * rel)
                         for q in cfg.mq_orders]
            rows.append(row)
        _write_csv(os.path.join(out_dir, "mq.csv"), header, rows)

    report = _report_rows(result)
    if report is not None:
        header, rows = report
        _write_csv(os.path.join(out_dir, "report.csv"), header, rows)


def _slice_reference(cfg, v, t):
    """Closed-form slice values f_exact(v e_x) where one exists."""
    if cfg.scenario == "bkw":
        pts = np.zeros((v.size, 3))
        pts[:, 0] = v
        return bkw_exact(pts, cfg.t_offset + t)
    if cfg.scenario == "slowdown-const-T":
        speeds = np.abs(v)
        a = max(cfg.init_T - cfg.thermostat_T, 0.0)
        out = np.empty_like(v)
        for i, s in enumerate(speeds):
            out[i] = self_similar_F(max(s, 1e-12), cfg.thermostat_T, a, t)
        return out
    return None


def _report_rows(result):
    cfg = result.config
    if cfg.scenario == "maxwell-elastic":
        header = ["t", "name", "computed", "exact", "abs_err", "rel_err"]
        rows = []
        comps = [("M11", (0, 0)), ("M12", (0, 1)), ("M22", (1, 1)),
                 ("M33", (2, 2))]
        for ms in result.series:
            M, r = maxwell_second_moment_exact(ms.t)
            for name, (i, j) in comps:
                ex, got = M[i, j], ms.M2[i, j]
                rows.append([ms.t, name, got, ex, got - ex,
                             (got - ex) / max(abs(ex), 1e-300)])
            for k, name in ((0, "r1"), (1, "r2")):
                ex, got = r[k], ms.r[k]
                rows.append([ms.t, name, got, ex, got - ex,
                             (got - ex) / max(abs(ex), 1e-300)])
        return header, rows
    if cfg.scenario == "inelastic":
        beta = 0.5 * (1.0 + cfg.e)
        first = result.series[0]
        K0 = first.E + 0.5 * np.sum(first.V ** 2)
        header = ["t", "K_computed", "K_exact", "abs_err", "rel_err"]
        rows = []
        for ms in result.series:
            K = ms.E + 0.5 * np.sum(ms.V ** 2)
            ex = inelastic_energy_exact(ms.t, beta, K0, first.V)
            rows.append([ms.t, K, ex, K - ex, (K - ex) / abs(ex)])
        return header, rows
    if cfg.scenario == "inelastic-diffusion" and cfg.lam == 0.0:
        header = ["t", "T_computed", "T_exact", "abs_err", "rel_err"]
        T0 = result.series[0].T
        rows = []
        for ms in result.series:
            ex = diffusion_temperature_exact(
                ms.t, cfg.mu_diff, cfg.zeta_prefactor, cfg.C, cfg.e, T0)
            rows.append([ms.t, ms.T, ex, ms.T - ex, (ms.T - ex) / abs(ex)])
        return header, rows
    return None


def run(cfg: ScenarioConfig, out_dir=None) -> int:
    """Execute a scenario and write its artifacts; returns the exit code."""
    from .stepper import ScenarioAbort, run_scenario
    out = out_dir or cfg.out_dir
    try:
        result = run_scenario(cfg)
    except ScenarioAbort as exc:
        print(f"error: {exc}", file=sys.stderr)
        if exc.result is not None and exc.result.series:
            write_artifacts(exc.result, out)
        return 2
    write_artifacts(result, out)
    return 0


# ---------------------------------------------------------------------------
# compare


def _read_csv(path):
    with open(path) as fh:
        rd = csv.reader(fh)
        header = next(rd, None)
        if header is None:
            raise ValueError(f"{path}: empty file")
        rows = [row for row in rd]
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return header, rows


def compare(computed_path, reference_path, tol) -> int:
    """Row-wise relative comparison of two CSV series.

    The first column is the row key; remaining numeric columns are compared
    with |a - b| <= tol * max(|b|, scale) where scale is the column's
    reference inf-norm (guards near-zero crossings).  Prints a summary,
    returns 0 on pass, 3 on fail.
    """
    h1, r1 = _read_csv(computed_path)
    h2, r2 = _read_csv(reference_path)
    if h1 != h2:
        raise ValueError(f"column mismatch: {h1} vs {h2}")
    if len(r1) != len(r2):
        raise ValueError(f"series length mismatch: {len(r1)} vs {len(r2)}")
    a = np.array([[float(x) for x in row[1:]] for row in r1])
    b = np.array([[float(x) for x in row[1:]] for row in r2])
    scale = np.maximum(np.max(np.abs(b), axis=0), 1e-300)
    rel = np.abs(a - b) / scale[None, :]
    worst = rel.max(axis=0)
    failed = []
    for j, col in enumerate(h1[1:]):
        status = "pass" if worst[j] <= tol else "FAIL"
        print(f"{col}: max rel err {worst[j]:.3e} (tol {tol:g}) {status}")
        if worst[j] > tol:
            failed.append(col)
    if failed:
        print(f"FAIL: {len(failed)} column(s) out of tolerance: {failed}")
        return 3
    print("PASS")
    return 0


# ---------------------------------------------------------------------------
# entry point


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="speckin",
                                 description="deterministic spectral kinetic solver")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", help="run a scenario config")
    sp.add_argument("config")
    sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    sp.add_argument("--out", default=None)

    cp = sub.add_parser("compare", help="compare two CSV series")
    cp.add_argument("computed")
    cp.add_argument("reference")
    cp.add_argument("--tol", type=float, required=True)

    bp = sub.add_parser("bench", help="run the benchmark catalogue")
    bp.add_argument("action", choices=["run", "list"])
    bp.add_argument("--tier", choices=["smoke", "full"], default="smoke")
    bp.add_argument("--only", default=None)
    bp.add_argument("--out", default="bench_out")

    args = ap.parse_args(argv)
    try:
        if args.command == "solve":
            cfg = parse_config(args.config, overrides=args.set)
            return run(cfg, out_dir=args.out)
        if args.command == "compare":
            return compare(args.computed, args.reference, args.tol)
        if args.command == "bench":
            from .bench import run_catalogue
            if args.action == "list":
                from .bench import catalogue
                for entry in catalogue():
                    print(entry.name)
                return 0
            return run_catalogue(tier=args.tier, only=args.only,
                                 out_root=args.out)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
