"""Scenario configuration, execution and persistence.

A scenario is a nested JSON object mirroring ``ScenarioConfig``.  Each run
writes one directory with trajectory.csv, conserved.csv, energies.csv,
bounds.csv, their whitespace-separated .dat twins, and manifest.json.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import json
import logging
import platform
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import BoundReport, SamplerConfig, verify_pointwise_bounds
from .dynamics import (IntegratorConfig, Trajectory, correction_multiplier, evolve,
                       high_sobolev_energy, measure_increment, track_modified_energies)
from .equations import (EquationSpec, PotentialSpec, exponential_potential, gaussian_potential,
                        potential_from_file)
from .errors import ConfigError, TooFewPoints
from .fitting import FitResult, fit_loglog
from .ladder import conserved_series
from .multipliers import ThetaProfile
from .seeding import child_rng
from .spectral import Field, Grid, dealias_mask, fwd, inv

log = logging.getLogger(__name__)

__all__ = [
    "ScenarioConfig", "EquationConfig", "PotentialConfig", "InitialDataConfig", "GridConfig",
    "IntegratorSection", "ObservablesConfig", "ThetaConfig", "load_config", "config_from_dict",
    "config_to_dict", "apply_overrides", "override_flags", "run_scenario", "RunResult",
    "sweep", "SweepResult", "PRESETS", "preset", "build_initial_data", "METRICS",
]


@dataclass
class PotentialConfig:
    shape: str = "gaussian"
    width: float = 0.1
    rate: float = 1.0
    mass: float = 1.0
    path: str | None = None


@dataclass
class EquationConfig:
    kind: str = "cubic"
    sign: int = 1
    potential: PotentialConfig | None = None


@dataclass
class InitialDataConfig:
    family: str = "gaussian"
    amplitude: float = 1.0
    width: float = 1.0
    phase_velocity: float = 0.0
    scale: float = 1.0
    separation: float = 4.0
    decay: float = 1.75
    norm: float = 1.0
    path: str | None = None
    project: bool = False  # restrict the initial spectrum to the dealiased band


@dataclass
class GridConfig:
    L: float = 40 * np.pi
    M: int = 1024


@dataclass
class IntegratorSection:
    scheme: str = "ifrk4"
    dt: float = 1e-3
    T: float = 1.0
    record_every: int = 10
    dealias_fraction: float | None = None
    nonlinear: bool = True  # False runs the free (linear) flow as a control


@dataclass
class ThetaConfig:
    s: float = 1.5
    N: list = field(default_factory=list)
    c: float | None = None


@dataclass
class ObservablesConfig:
    s: list = field(default_factory=lambda: [1.0])
    N: list = field(default_factory=list)
    delta: float = 0.1
    k_max: int = 0
    theta: ThetaConfig = field(default_factory=ThetaConfig)
    bound_samples: int = 0


@dataclass
class ScenarioConfig:
    equation: EquationConfig = field(default_factory=EquationConfig)
    initial_data: InitialDataConfig = field(default_factory=InitialDataConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    integrator: IntegratorSection = field(default_factory=IntegratorSection)
    observables: ObservablesConfig = field(default_factory=ObservablesConfig)
    seed: int = 0
    output_dir: str = "runs/out"


# config (de)serialization

def _nested_type(cls, name):
    for f in dataclasses.fields(cls):
        if f.name == name:
            t = f.type if not isinstance(f.type, str) else f.type
            for cand in (PotentialConfig, EquationConfig, InitialDataConfig, GridConfig,
                         IntegratorSection, ThetaConfig, ObservablesConfig):
                if cand.__name__ in str(t):
                    return cand
    return None


def _build(cls, data, path):
    if not isinstance(data, dict):
        raise ConfigError(f"{path or '<root>'}: expected an object, got {type(data).__name__}")
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigError(f"{path + '.' if path else ''}{unknown[0]}: unknown key")
    kwargs = {}
    for k, v in data.items():
        sub = _nested_type(cls, k)
        key = f"{path}.{k}" if path else k
        if sub is not None and v is not None:
            kwargs[k] = _build(sub, v, key)
        else:
            kwargs[k] = v
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"{path or '<root>'}: {exc}") from None


def config_from_dict(data: dict) -> ScenarioConfig:
    cfg = _build(ScenarioConfig, data, "")
    validate(cfg)
    return cfg


def config_to_dict(cfg) -> dict:
    return dataclasses.asdict(cfg)


def load_config(path) -> ScenarioConfig:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if isinstance(data, dict) and "config" in data and "manifest" not in data and "version" in data:
        data = data["config"]  # a manifest re-ingested as a config
    try:
        return config_from_dict(data)
    except ConfigError as exc:
        key = str(exc).split(":", 1)[0].rsplit(".", 1)[-1]
        for i, line in enumerate(text.splitlines(), 1):
            if f'"{key}"' in line:
                raise ConfigError(f"{path}:{i}: {exc}") from None
        raise ConfigError(f"{path}: {exc}") from None


def _leaf_paths(cls, prefix=()):
    for f in dataclasses.fields(cls):
        sub = _nested_type(cls, f.name)
        if sub is not None:
            yield from _leaf_paths(sub, prefix + (f.name,))
        else:
            yield prefix + (f.name,)


def _flag_for(path):
    # --grid-m, --theta-n, --integrator-dt, --seed
    section = path[-2] if len(path) > 1 else None
    name = path[-1].lower().replace("_", "-")
    if section is None:
        return name
    return f"{section.replace('_', '-')}-{name}"


def override_flags() -> dict:
    """Map of kebab-case flag name to the config path it sets."""
    return {_flag_for(p): p for p in _leaf_paths(ScenarioConfig)}


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        pass
    if "," in text:
        return [_parse_value(t) for t in text.split(",") if t]
    return text


def apply_overrides(cfg: ScenarioConfig, overrides: dict) -> ScenarioConfig:
    """Apply {flag-name: raw string} overrides and revalidate."""
    data = config_to_dict(cfg)
    flags = override_flags()
    for flag, raw in overrides.items():
        if flag not in flags:
            raise ConfigError(f"--{flag}: unknown option")
        path = flags[flag]
        node = data
        for key in path[:-1]:
            if node.get(key) is None:
                node[key] = {}
            node = node[key]
        val = _parse_value(raw) if isinstance(raw, str) else raw
        if path in (("observables", "N"), ("observables", "s"), ("observables", "theta", "N")) \
                and not isinstance(val, list):
            val = [val]
        node[path[-1]] = val
    return config_from_dict(data)


INITIAL_FAMILIES = ("gaussian", "sech", "two_bump", "power_law", "file", "zero")


def validate(cfg: ScenarioConfig):
    eq = cfg.equation
    if eq.kind not in ("cubic", "hartree", "dnls"):
        raise ConfigError(f"equation.kind: unknown equation {eq.kind!r}")
    if eq.sign not in (1, -1):
        raise ConfigError("equation.sign: must be 1 or -1")
    if eq.kind == "hartree" and eq.potential is None:
        raise ConfigError("equation.potential: required for the Hartree equation")
    if eq.potential is not None and eq.potential.shape not in ("gaussian", "exponential", "file"):
        raise ConfigError(f"equation.potential.shape: unknown shape {eq.potential.shape!r}")
    if cfg.initial_data.family not in INITIAL_FAMILIES:
        raise ConfigError(f"initial_data.family: must be one of {INITIAL_FAMILIES}")
    try:
        Grid(cfg.grid.L, cfg.grid.M)
        _integrator(cfg)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    ob = cfg.observables
    if not isinstance(ob.s, list) or not isinstance(ob.N, list) or not isinstance(ob.theta.N, list):
        raise ConfigError("observables.s, observables.N and observables.theta.N must be lists")
    if ob.delta <= 0:
        raise ConfigError("observables.delta: must be positive")
    if not 0 <= ob.k_max <= 9:
        raise ConfigError("observables.k_max: must lie in 0..9")
    if ob.theta.N and cfg.grid.M > 128:
        raise ConfigError("observables.theta.N: modified energies need grid.M <= 128")
    if not isinstance(cfg.seed, int) or not 0 <= cfg.seed < 2 ** 64:
        raise ConfigError("seed: must be a 64-bit unsigned integer")


def _integrator(cfg) -> IntegratorConfig:
    it = cfg.integrator
    return IntegratorConfig(it.scheme, float(it.dt), float(it.T), it.dealias_fraction, int(it.record_every))


# building blocks

def build_potential(cfg: ScenarioConfig, grid: Grid) -> PotentialSpec | None:
    pc = cfg.equation.potential
    if pc is None:
        return None
    if pc.shape == "gaussian":
        return gaussian_potential(grid, pc.width, pc.mass)
    if pc.shape == "exponential":
        return exponential_potential(grid, pc.rate, pc.mass)
    return potential_from_file(grid, pc.path)


def build_spec(cfg: ScenarioConfig, grid: Grid) -> EquationSpec:
    return EquationSpec(cfg.equation.kind, cfg.equation.sign, build_potential(cfg, grid))


def build_initial_data(cfg: ScenarioConfig, grid: Grid) -> Field:
    d = cfg.initial_data
    x = grid.x
    if d.family == "gaussian":
        u = d.amplitude * np.exp(-(x / d.width) ** 2 + 1j * d.phase_velocity * x)
    elif d.family == "sech":
        u = d.amplitude / np.cosh(d.scale * x)
    elif d.family == "two_bump":
        h = 0.5 * d.separation
        u = d.amplitude * (np.exp(-((x - h) / d.width) ** 2 + 1j * d.phase_velocity * x)
                           + np.exp(-((x + h) / d.width) ** 2 - 1j * d.phase_velocity * x))
    elif d.family == "power_law":
        # random phases, |u_hat| ~ <xi>^-decay, scaled to L2 norm ``norm``
        rng = child_rng(cfg.seed, 0)
        ph = np.exp(2j * np.pi * rng.random(grid.M))
        frac = cfg.integrator.dealias_fraction or 0.5
        uh = (1 + grid.xi ** 2) ** (-d.decay / 2) * ph * dealias_mask(grid, frac)
        u = inv(uh, grid)
        u = u * d.norm / np.sqrt(grid.dx * np.sum(np.abs(u) ** 2))
    elif d.family == "file":
        data = np.loadtxt(d.path, ndmin=2)
        xs = data[:, 0]
        re = np.interp(x, xs, data[:, 1], left=0.0, right=0.0)
        im = np.interp(x, xs, data[:, 2], left=0.0, right=0.0) if data.shape[1] > 2 else 0.0
        u = re + 1j * im
    else:
        u = np.zeros(grid.M, dtype=complex)
    if d.project:
        frac = cfg.integrator.dealias_fraction or 0.5
        u = inv(fwd(u, grid) * dealias_mask(grid, frac), grid)
    return Field(grid, u)


def _soliton_exact(cfg: ScenarioConfig):
    """Closed form when the data is a focusing cubic soliton A sech(a x)."""
    d, eq = cfg.initial_data, cfg.equation
    if (eq.kind == "cubic" and eq.sign == -1 and d.family == "sech"
            and abs(d.amplitude - np.sqrt(2) * d.scale) <= 1e-14 * max(1.0, d.amplitude)):
        return lambda x, t: d.amplitude / np.cosh(d.scale * x) * np.exp(1j * d.scale ** 2 * t)
    return None


# CSV writing

def _fmt(v):
    if v is None or (isinstance(v, float) and np.isnan(v)):
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _write_table(path: Path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    path.write_text(buf.getvalue())
    dat = ["# " + " ".join(header)]
    for r in rows:
        dat.append(" ".join(_fmt(v) if _fmt(v) != "" else "nan" for v in r))
    path.with_suffix(".dat").write_text("\n".join(dat) + "\n")


def read_table(path) -> tuple[list, list]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


@dataclass
class RunResult:
    output_dir: Path
    trajectory: Trajectory
    channels: dict
    conserved: list
    energies: list
    bounds: BoundReport | None
    metrics: dict


def _tag(v) -> str:
    return f"{float(v):g}"


def run_scenario(cfg: ScenarioConfig, output_dir=None, write: bool = True) -> RunResult:
    validate(cfg)
    out = Path(output_dir or cfg.output_dir)
    grid = Grid(cfg.grid.L, cfg.grid.M)
    spec = build_spec(cfg, grid)
    phi = build_initial_data(cfg, grid)
    icfg = _integrator(cfg)
    traj = evolve(spec, phi, icfg, nonlinear=cfg.integrator.nonlinear)
    ob = cfg.observables
    C = traj.coeffs()
    t = traj.times
    ch: dict[str, np.ndarray] = {"t": t}

    reps = conserved_series(traj.fields, t, spec, ob.k_max)
    for r in reps:
        if r.name in ("mass", "energy"):
            ch[r.name] = np.real(r.values)
    for s in ob.s:
        ch[f"Hs_norm_s{_tag(s)}"] = np.sqrt(np.sum((1 + grid.xi ** 2) ** s * np.abs(C) ** 2, axis=1) / grid.L)
        for N in ob.N:
            ch[f"Qu_norm_sq_s{_tag(s)}_N{_tag(N)}"] = high_sobolev_energy(C, grid, s, N)
            inc = measure_increment(traj, s, N, ob.delta)
            col = np.full(t.size, np.nan)
            col[: inc.delta.size] = inc.delta
            ch[f"increment_s{_tag(s)}_N{_tag(N)}"] = col
    energies = []
    for N in ob.theta.N:
        th = ThetaProfile(ob.theta.s, N)
        m = correction_multiplier(spec, th, ob.theta.c)
        rep = track_modified_energies(traj, th, m, ob.delta)
        ch[f"E1_N{_tag(N)}"] = rep.E1
        ch[f"E2_re_N{_tag(N)}"] = rep.E2
        ch[f"E2_im_N{_tag(N)}"] = rep.lam4.imag
        energies.append(rep)
    for r in reps:
        if r.name.startswith("P"):
            ch[f"{r.name}_re"] = np.real(r.values)
            ch[f"{r.name}_im"] = np.imag(r.values)
    exact = _soliton_exact(cfg)
    if exact is not None:
        err = [np.linalg.norm(f.samples - exact(grid.x, tt)) / np.linalg.norm(exact(grid.x, tt))
               for f, tt in zip(traj.fields, t)]
        ch["soliton_error"] = np.array(err)

    bounds = None
    if ob.bound_samples:
        bounds = verify_pointwise_bounds(ThetaProfile(ob.theta.s, (ob.theta.N or [8])[0]),
                                         SamplerConfig(ob.bound_samples, cfg.seed))

    metrics = _metrics(ch, reps, energies, cfg)
    traj.channels.update(ch)
    if write:
        out.mkdir(parents=True, exist_ok=True)
        names = list(ch)
        _write_table(out / "trajectory.csv", names, [[ch[n][i] for n in names] for i in range(t.size)])
        _write_table(out / "conserved.csv", ["name", "value_re", "value_im", "max_rel_drift"],
                     [[r.name, r.value.real, r.value.imag, r.drift] for r in reps])
        _write_table(out / "energies.csv",
                     ["N", "s", "max_drift_E1", "max_drift_E2", "min_E2_over_E1",
                      "max_E2_over_E1", "max_imag_ratio"],
                     [[e.N, e.s, e.max_drift_E1, e.max_drift_E2, float(np.min(e.E2 / e.E1)),
                       float(np.max(e.E2 / e.E1)), e.max_imag_ratio] for e in energies])
        brows = bounds.rows if bounds else []
        _write_table(out / "bounds.csv", ["bound_id", "regime", "samples", "max_ratio", "p99_ratio", "N", "s"],
                     [[b.bound_id, b.regime, b.samples, b.max_ratio, b.p99_ratio, float(b.N), float(b.s)]
                      for b in brows])
        manifest = {
            "config": config_to_dict(cfg),
            "seed": cfg.seed,
            "version": __version__,
            "started_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "host": platform.node(),
        }
        (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return RunResult(out, traj, ch, reps, energies, bounds, metrics)


METRICS = ("soliton_error", "max_increment", "E2_drift", "E1_drift", "mass_drift", "energy_drift")


def _metrics(ch, reps, energies, cfg) -> dict:
    m = {}
    if "soliton_error" in ch:
        m["soliton_error"] = float(np.max(ch["soliton_error"]))
    incs = [k for k in ch if k.startswith("increment_")]
    if incs:
        m["max_increment"] = float(max(np.nanmax(np.abs(ch[k])) if np.any(np.isfinite(ch[k])) else 0.0
                                       for k in incs))
    if energies:
        m["E2_drift"] = max(e.max_drift_E2 for e in energies)
        m["E1_drift"] = max(e.max_drift_E1 for e in energies)
    for r in reps:
        if r.name in ("mass", "energy"):
            m[f"{r.name}_drift"] = r.drift
    return m


# sweeps

@dataclass
class SweepResult:
    axis: str
    values: list
    metric: str
    measured: list
    fit: FitResult | None
    runs: list


def _vary(cfg: ScenarioConfig, axis: str, value, out: Path) -> ScenarioConfig:
    d = config_to_dict(cfg)
    if axis == "dt":
        d["integrator"]["dt"] = float(value)
        # keep the recording interval fixed in time
        rec = cfg.integrator.dt * cfg.integrator.record_every
        d["integrator"]["record_every"] = max(1, int(round(rec / float(value))))
    elif axis == "M":
        d["grid"]["M"] = int(value)
    elif axis == "N":
        d["observables"]["N"] = [value]
        if cfg.observables.theta.N:
            d["observables"]["theta"]["N"] = [value]
    else:
        raise ConfigError(f"sweep axis must be one of N, dt, M, got {axis!r}")
    d["output_dir"] = str(out / f"{axis}_{_tag(value)}")
    return config_from_dict(d)


def _run_metric(args):
    cfg, metric = args
    res = run_scenario(cfg)
    if metric not in res.metrics:
        raise ConfigError(f"metric {metric!r} is not produced by this scenario "
                          f"(available: {sorted(res.metrics)})")
    return res.metrics[metric], str(res.output_dir)


def sweep(cfg: ScenarioConfig, axis: str, values, metric: str, jobs: int = 1,
          output_dir=None) -> SweepResult:
    values = list(values)
    if len(values) < 3:
        raise TooFewPoints("a sweep needs at least 3 values")
    if metric not in METRICS:
        raise ConfigError(f"metric must be one of {METRICS}")
    out = Path(output_dir or cfg.output_dir)
    cfgs = [_vary(cfg, axis, v, out) for v in values]
    tasks = [(c, metric) for c in cfgs]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_run_metric, tasks))
    else:
        results = [_run_metric(t) for t in tasks]
    measured = [r[0] for r in results]
    fit = fit_loglog(np.asarray(values, dtype=float), np.asarray(measured, dtype=float))
    out.mkdir(parents=True, exist_ok=True)
    _write_table(out / "sweep.csv", [axis, metric, "run_dir"],
                 [[float(v), m, r[1]] for v, m, r in zip(values, measured, results)])
    fr = fit.as_row()
    _write_table(out / "fit.csv", list(fr), [list(fr.values())])
    return SweepResult(axis, values, metric, measured, fit, [r[1] for r in results])


# shipped presets

PRESETS = {
    "soliton": {
        "equation": {"kind": "cubic", "sign": -1},
        "initial_data": {"family": "sech", "amplitude": float(np.sqrt(2.0)), "scale": 1.0},
        "grid": {"L": float(40 * np.pi), "M": 1024},
        "integrator": {"scheme": "ifrk4", "dt": 1e-3, "T": 5.0, "record_every": 100},
        "observables": {"s": [1.0]},
        "output_dir": "runs/soliton",
    },
    "ladder": {
        "equation": {"kind": "cubic", "sign": 1},
        "initial_data": {"family": "gaussian", "amplitude": 0.8, "width": 2.0, "phase_velocity": 0.5},
        "grid": {"L": float(40 * np.pi), "M": 1024},
        "integrator": {"scheme": "ifrk4", "dt": 0.01, "T": 2.0, "record_every": 10},
        "observables": {"s": [1.0], "k_max": 5},
        "output_dir": "runs/ladder",
    },
    "increments": {
        "equation": {"kind": "cubic", "sign": 1},
        "initial_data": {"family": "gaussian", "amplitude": 1.0, "width": 0.15},
        "grid": {"L": 20.0, "M": 1024},
        "integrator": {"scheme": "ifrk4", "dt": 1e-3, "T": 1.0, "record_every": 10},
        "observables": {"s": [2.5], "N": [4, 8, 16, 32, 64], "delta": 0.1},
        "output_dir": "runs/increments",
    },
    "hartree_energy": {
        "equation": {"kind": "hartree", "sign": 1, "potential": {"shape": "gaussian", "width": 0.1}},
        "initial_data": {"family": "power_law", "decay": 1.75, "norm": 1.0},
        "grid": {"L": 2.0, "M": 128},
        "integrator": {"scheme": "ifrk4", "dt": 1e-4, "T": 1.0, "record_every": 100,
                       "dealias_fraction": 0.5},
        "observables": {"s": [1.5], "delta": 0.1, "theta": {"s": 1.5, "N": [4, 8, 16, 32]}},
        "seed": 7,
        "output_dir": "runs/hartree_energy",
    },
    "dnls": {
        "equation": {"kind": "dnls"},
        "initial_data": {"family": "gaussian", "amplitude": 0.7, "width": 1.5, "phase_velocity": 0.3},
        "grid": {"L": float(40 * np.pi), "M": 1024},
        "integrator": {"scheme": "ifrk4", "dt": 2e-3, "T": 2.0, "record_every": 50},
        "observables": {"s": [1.0]},
        "output_dir": "runs/dnls",
    },
    "dnls_energy": {
        "equation": {"kind": "dnls"},
        "initial_data": {"family": "power_law", "decay": 1.75, "norm": 1.0},
        "grid": {"L": 4.0, "M": 128},
        "integrator": {"scheme": "ifrk4", "dt": 1e-4, "T": 0.5, "record_every": 100},
        "observables": {"s": [1.5], "delta": 0.1, "theta": {"s": 1.5, "N": [8, 16, 32]}},
        "seed": 3,
        "output_dir": "runs/dnls_energy",
    },
}


def preset(name: str) -> ScenarioConfig:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return config_from_dict(json.loads(json.dumps(PRESETS[name])))
