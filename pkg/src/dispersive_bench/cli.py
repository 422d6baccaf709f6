"""Command-line entry point: ``dispersive-bench <subcommand>``.

Exit codes: 0 success, 2 validation failure, 3 runtime failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .errors import BenchError, ConfigError, NonFinite, TooFewPoints
from .estimates import KINDS, EnsembleConfig, bilinear_ratio, corollary_ratio, strichartz_ratio, write_ratio_csv
from .fitting import fit_growth_envelope, fit_loglog
from .harness import (METRICS, PRESETS, apply_overrides, load_config, override_flags, preset,
                      read_table, run_scenario, sweep)
from .bounds import BOUND_IDS, SamplerConfig, verify_pointwise_bounds
from .multipliers import ThetaProfile

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 2, 3

log = logging.getLogger("dispersive_bench")


def _add_scenario_args(p):
    p.add_argument("--config", help="JSON scenario file")
    p.add_argument("--preset", choices=sorted(PRESETS))
    g = p.add_argument_group("config overrides")
    for flag in override_flags():
        g.add_argument(f"--{flag}", dest=f"ov_{flag}", metavar="VALUE")


def _scenario(args):
    if args.config and args.preset:
        raise ConfigError("give either --config or --preset, not both")
    if args.config:
        cfg = load_config(args.config)
    elif args.preset:
        cfg = preset(args.preset)
    else:
        raise ConfigError("a scenario needs --config or --preset")
    ov = {k[3:]: v for k, v in vars(args).items() if k.startswith("ov_") and v is not None}
    return apply_overrides(cfg, ov) if ov else cfg


def cmd_simulate(args):
    res = run_scenario(_scenario(args))
    print(f"wrote {res.output_dir}")
    for k, v in res.metrics.items():
        print(f"{k} {v:.6e}")


def cmd_sweep(args):
    cfg = _scenario(args)
    values = [float(v) if args.axis == "dt" else int(float(v)) for v in args.values.split(",") if v]
    res = sweep(cfg, args.axis, values, args.metric, args.jobs, args.out)
    for v, m in zip(res.values, res.measured):
        print(f"{args.axis}={v:g} {args.metric}={m:.6e}")
    f = res.fit
    print(f"slope {f.slope:.4f} intercept {f.intercept:.4f} rms {f.residual_rms:.3e} "
          f"points {f.points_used}" + (f" ({f.note})" if f.note else ""))


def cmd_conserved(args):
    if args.show_ladder:
        from .ladder import build_p_ladder, coupling_for_sign
        for k, P in enumerate(build_p_ladder(args.show_ladder, coupling_for_sign(args.sign)), 1):
            print(f"P{k} = {P}")
        return
    res = run_scenario(_scenario(args), write=not args.no_write)
    print("name value_re value_im max_rel_drift")
    for r in res.conserved:
        print(f"{r.name} {r.value.real:.12e} {r.value.imag:.12e} {r.drift:.3e}")


def cmd_verify_multiplier(args):
    rows = []
    for s in args.s:
        for N in args.N:
            rep = verify_pointwise_bounds(ThetaProfile(s, N), SamplerConfig(args.samples, args.seed),
                                          tuple(args.bounds))
            rows.append(rep.to_csv())
    text = rows[0] + "".join(r.split("\n", 1)[1] for r in rows[1:])
    _emit(text, args.out)


def cmd_verify_strichartz(args):
    cfg = EnsembleConfig(trials=args.trials, seed=args.seed, T_w=args.T_w, M_t=args.M_t)
    stats = []
    if args.kind in KINDS:
        stats.append(strichartz_ratio(args.kind, cfg))
    else:
        fn = bilinear_ratio if args.kind == "bilinear" else corollary_ratio
        stats = [fn(float(N), cfg) for N in args.N]
    _emit(write_ratio_csv(stats), args.out)


def cmd_fit(args):
    header, rows = read_table(args.csv)
    for col in (args.x, args.y):
        if col not in header:
            raise ConfigError(f"column {col!r} not in {args.csv} (have {header})")
    x = np.array([float(r[header.index(args.x)] or "nan") for r in rows])
    y = np.array([float(r[header.index(args.y)] or "nan") for r in rows])
    ok = np.isfinite(x) & np.isfinite(y)
    fit = fit_growth_envelope(x[ok], y[ok]) if args.envelope else fit_loglog(x[ok], np.abs(y[ok]))
    print(json.dumps(fit.as_row()))


def _emit(text, out):
    if out:
        Path(out).write_text(text)
        print(f"wrote {out}")
    else:
        sys.stdout.write(text)


def _floats(text):
    return [float(v) for v in text.split(",") if v]


def build_parser():
    ap = argparse.ArgumentParser(prog="dispersive-bench", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one scenario")
    _add_scenario_args(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="vary one axis and fit a log-log slope")
    _add_scenario_args(p)
    p.add_argument("--axis", choices=("N", "dt", "M"), required=True)
    p.add_argument("--values", required=True, help="comma-separated")
    p.add_argument("--metric", choices=METRICS, required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("conserved", help="report conserved quantities of a run")
    _add_scenario_args(p)
    p.add_argument("--show-ladder", type=int, default=0, metavar="K",
                   help="print the first K densities and exit")
    p.add_argument("--sign", type=int, default=1, choices=(1, -1))
    p.add_argument("--no-write", action="store_true")
    p.set_defaults(func=cmd_conserved)

    p = sub.add_parser("verify-multiplier", help="sampled pointwise multiplier bounds")
    p.add_argument("--s", type=_floats, default=[1.5])
    p.add_argument("--N", type=_floats, default=[8.0])
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bounds", nargs="+", choices=BOUND_IDS, default=list(BOUND_IDS))
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify_multiplier)

    p = sub.add_parser("verify-strichartz", help="Monte-Carlo space-time estimate ratios")
    p.add_argument("--kind", choices=sorted(KINDS) + ["bilinear", "corollary"], default="bilinear")
    p.add_argument("--N", type=_floats, default=[8, 16, 32, 64, 128, 256])
    p.add_argument("--trials", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--T-w", dest="T_w", type=float, default=1.0)
    p.add_argument("--M-t", dest="M_t", type=int, default=128)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify_strichartz)

    p = sub.add_parser("fit", help="log-log fit of two CSV columns")
    p.add_argument("csv")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--envelope", action="store_true", help="fit the running max against 1 + x")
    p.set_defaults(func=cmd_fit)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (ConfigError, ValueError, TooFewPoints, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NonFinite as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except BenchError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
