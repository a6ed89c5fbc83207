"""Command line front end: config loading, run directories, table emission.

Subcommands
-----------
gps-dist   photon-number distribution table of one solved (or explicit) unit
solve      solved unit parameters, optionally a coarse envelope-exponent scan
simulate   two-phase Monte Carlo run: manifest, per-trial CSV, summary JSON
waveplot   plot-ready data files (overlays, metric scatter, multiplex sweep)

Config files are a single JSON object mirroring FactoryConfig plus grid and
output settings; command line flags override file fields, and environment
variables with the GKPSIM_ prefix override both (CI hook). All outputs are
plain CSV/JSON; rendering is out of scope.
"""

import argparse
import json
import math
import os
import sys
import time
from dataclasses import asdict

import numpy as np

from . import __version__
from .errors import ConfigurationError, GkpSimError
from .factory import (
    FactoryConfig,
    analytic_total,
    cat_baseline_config,
    conditioned_phase,
    count_phase,
    estimate,
    records_to_csv,
    scatter_metrics,
    simulate,
    solve_for_config,
    sweep_m,
)
from .gps import GpsParams, distribution_csv, p_ngs, photon_distribution, solve_params
from .targets import SensorParams, breeding_target, from_decibels, sensor_state
from .wavefield import GridSpec, displace_p, dump_csv

ENV_PREFIX = "GKPSIM_"

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2

_CONFIG_FIELDS = {
    "m_units": int,
    "n_inputs": int,
    "n_min": int,
    "n_max": int,
    "envelope_c": float,
    "trials": int,
    "count_trials": int,
    "seed": int,
    "threshold_db": float,
}


def _fail_config(msg):
    print(f"config error: {msg}", file=sys.stderr)
    raise SystemExit(EXIT_CONFIG)


def load_config(path, overrides):
    """Read the JSON config, then apply env and flag overrides in order."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        _fail_config(f"cannot read {path}: {exc}")
    except json.JSONDecodeError as exc:
        _fail_config(f"{path} is not valid JSON: line {exc.lineno}: {exc.msg}")
    if not isinstance(raw, dict):
        _fail_config("top level must be a JSON object")

    grid_raw = raw.pop("grid", {})
    explicit_gps = raw.pop("gps", None)
    fields = {}
    for key, value in raw.items():
        if key not in _CONFIG_FIELDS:
            _fail_config(f"unknown field '{key}'")
        try:
            fields[key] = _CONFIG_FIELDS[key](value)
        except (TypeError, ValueError):
            _fail_config(f"field '{key}' must be {_CONFIG_FIELDS[key].__name__}")

    for key in _CONFIG_FIELDS:
        env = os.environ.get(ENV_PREFIX + key.upper())
        if env is not None:
            try:
                fields[key] = _CONFIG_FIELDS[key](env)
            except ValueError:
                _fail_config(f"env {ENV_PREFIX + key.upper()} must be {_CONFIG_FIELDS[key].__name__}")
    for key, value in overrides.items():
        if value is not None:
            fields[key] = value

    try:
        grid = GridSpec(
            half_width=float(grid_raw.get("half_width", 25.0)),
            points=int(grid_raw.get("points", 4096)),
        )
        cfg = FactoryConfig(grid=grid, **fields)
    except (ConfigurationError, TypeError) as exc:
        _fail_config(str(exc))
    gps_pars = None
    if explicit_gps is not None:
        try:
            gps_pars = GpsParams(
                r=float(explicit_gps["r"]), transmittance=float(explicit_gps["transmittance"])
            )
        except (KeyError, TypeError, ValueError, ConfigurationError) as exc:
            _fail_config(f"gps block: {exc}")
    return cfg, gps_pars


def make_run_dir(base, seed):
    stamp = time.strftime("%Y%m%dT%H%M%S", time.gmtime())
    path = os.path.join(base, f"{stamp}-seed{seed}")
    suffix = 0
    candidate = path
    while os.path.exists(candidate):
        suffix += 1
        candidate = f"{path}-{suffix}"
    os.makedirs(candidate)
    return candidate


def write_manifest(run_dir, cfg, params, config_path, extra=None):
    manifest = {
        "tool_version": __version__,
        "config_path": os.path.abspath(config_path),
        "config": {
            **{k: getattr(cfg, k) for k in _CONFIG_FIELDS},
            "grid": {"half_width": cfg.grid.half_width, "points": cfg.grid.points},
        },
        "gps_params": None
        if params is None
        else {
            "r": params.r,
            "transmittance": params.transmittance,
            "input_squeezing_db": params.input_squeezing_db,
            "envelope_exponent": params.envelope_exponent,
        },
        "started_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    if extra:
        manifest.update(extra)
    with open(os.path.join(run_dir, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def _solved(cfg, explicit):
    return explicit if explicit is not None else solve_for_config(cfg)


def cmd_gps_dist(args):
    cfg, explicit = load_config(args.config, _overrides(args))
    params = _solved(cfg, explicit)
    dist = photon_distribution(params, n_cap=max(cfg.n_max, 40))
    run_dir = make_run_dir(args.out, cfg.seed)
    write_manifest(run_dir, cfg, params, args.config)
    out = os.path.join(run_dir, "gps_dist.csv")
    distribution_csv(dist, cfg.n_min, cfg.n_max, out)
    window = p_ngs(params, cfg.n_min, cfg.n_max, distribution=dist)
    print(f"wrote {out}")
    print(f"window sum P({cfg.n_min}..{cfg.n_max}) = {window:.4f}")
    return EXIT_OK


def cmd_solve(args):
    cfg, explicit = load_config(args.config, _overrides(args))
    params = _solved(cfg, explicit)
    dist = photon_distribution(params, n_cap=max(cfg.n_max, 40))
    result = {
        "r": params.r,
        "transmittance": params.transmittance,
        "input_squeezing_db": params.input_squeezing_db,
        "envelope_exponent": params.envelope_exponent,
        "envelope_target": cfg.envelope_c / cfg.n_inputs,
        "p_ngs": p_ngs(params, cfg.n_min, cfg.n_max, distribution=dist),
    }
    if args.scan_c:
        lo, hi, steps = 1.0, 2.0, 11
        scan = []
        for c in np.linspace(lo, hi, steps):
            pars_c = solve_params(float(c), cfg.n_inputs, cfg.n_min, cfg.n_max)
            scan.append(
                {
                    "envelope_c": float(c),
                    "input_squeezing_db": pars_c.input_squeezing_db,
                    "p_ngs": p_ngs(pars_c, cfg.n_min, cfg.n_max),
                }
            )
        result["c_scan"] = scan
    run_dir = make_run_dir(args.out, cfg.seed)
    write_manifest(run_dir, cfg, params, args.config)
    out = os.path.join(run_dir, "solved.json")
    with open(out, "w", encoding="utf-8") as fh:
        json.dump(result, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {out}")
    print(f"input squeezing {params.input_squeezing_db:.2f} dB, P_NGS {result['p_ngs']:.4f}")
    return EXIT_OK


def cmd_simulate(args):
    cfg, explicit = load_config(args.config, _overrides(args))
    run_dir = make_run_dir(args.out, cfg.seed)
    params = _solved(cfg, explicit)
    write_manifest(run_dir, cfg, params, args.config)
    t0 = time.time()
    distribution = photon_distribution(params, n_cap=max(cfg.n_max, 40))
    stats = count_phase(cfg, distribution)
    records, _ = conditioned_phase(cfg, params, distribution, workers=args.workers)
    report = estimate(cfg, distribution, records, stats)
    records_to_csv(records, os.path.join(run_dir, "results.csv"))
    if args.trace:
        with open(os.path.join(run_dir, "traces.jsonl"), "w", encoding="ascii") as fh:
            for r in records:
                if not r.ngs_success or r.error_tag:
                    continue
                fh.write(
                    json.dumps(
                        {
                            "trial_id": r.trial_id,
                            "outcomes": list(r.outcomes),
                            "correction": {"sigma": r.sigma, "x0": r.x0, "p0": r.p0},
                            "delta_x": from_decibels(r.delta_x_db),
                            "delta_p": from_decibels(r.delta_p_db),
                            "success": r.success,
                        },
                        sort_keys=True,
                    )
                    + "\n"
                )
    summary = {
        "config": {k: getattr(cfg, k) for k in _CONFIG_FIELDS},
        "input_squeezing_db": params.input_squeezing_db,
        "report": asdict(report),
        "runtime_seconds": time.time() - t0,
    }
    with open(os.path.join(run_dir, "summary.json"), "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"run dir {run_dir}")
    print(
        f"P_NGS {report.p_ngs_analytic:.4f}  P_HD {report.p_hd:.4f}  "
        f"P_total(analytic) {report.p_total_analytic:.3e}"
    )
    return EXIT_OK


def _parse_m_range(spec):
    try:
        lo, hi = spec.split("..")
        lo, hi = int(lo), int(hi)
        if lo > hi:
            raise ValueError
        return range(lo, hi + 1)
    except ValueError:
        _fail_config(f"--m-range must be A..B with A <= B, got '{spec}'")


def cmd_waveplot(args):
    cfg, explicit = load_config(args.config, _overrides(args))
    run_dir = make_run_dir(args.out, cfg.seed)
    params = _solved(cfg, explicit)
    write_manifest(run_dir, cfg, params, args.config, extra={"mode": args.mode})
    wrote_any = False

    if args.mode in ("overlay-chi", "overlay-sensor"):
        distribution = photon_distribution(params, n_cap=max(cfg.n_max, 40))
        _, states = conditioned_phase(
            cfg, params, distribution, workers=1, keep_states=args.max_traces
        )
        target_grid = cfg.grid
        if args.mode == "overlay-chi":
            target = breeding_target(cfg.envelope_c, cfg.n_max, cfg.n_inputs, target_grid)
        else:
            bar = from_decibels(cfg.threshold_db)
            target = sensor_state(SensorParams(bar, bar, parity=0), target_grid)
        dump_csv(target, os.path.join(run_dir, "target.csv"))
        for i, (rec, state) in enumerate(states):
            if args.mode == "overlay-chi":
                state = displace_p(state, -rec.p0)  # back to the pre-reference frame
            dump_csv(state, os.path.join(run_dir, f"trial{rec.trial_id:06d}.csv"))
            wrote_any = True
        if not wrote_any:
            print("warning: no successful trials to overlay", file=sys.stderr)

    elif args.mode == "scatter":
        distribution = photon_distribution(params, n_cap=max(cfg.n_max, 40))
        records, _ = conditioned_phase(cfg, params, distribution, workers=args.workers)
        pairs = scatter_metrics(records)
        base_cfg = cat_baseline_config(cfg)
        base_params = solve_for_config(base_cfg)
        base_dist = photon_distribution(base_params, n_cap=max(cfg.n_max, 40))
        base_records, _ = conditioned_phase(base_cfg, base_params, base_dist, workers=args.workers)
        base_pairs = scatter_metrics(base_records)
        out = os.path.join(run_dir, "scatter.csv")
        with open(out, "w", encoding="ascii") as fh:
            fh.write("mode,delta_x_db,delta_p_db\n")
            for dx_db, dp_db in pairs:
                fh.write(f"proposed,{dx_db:.12g},{dp_db:.12g}\n")
            for dx_db, dp_db in base_pairs:
                fh.write(f"cat,{dx_db:.12g},{dp_db:.12g}\n")
        wrote_any = bool(pairs or base_pairs)
        print(f"wrote {out}")

    elif args.mode == "sweep":
        distribution = photon_distribution(params, n_cap=max(cfg.n_max, 40))
        stats = count_phase(cfg, distribution)
        records, _ = conditioned_phase(cfg, params, distribution, workers=args.workers)
        report = estimate(cfg, distribution, records, stats)
        p_hd = 0.0 if math.isnan(report.p_hd) else report.p_hd
        curve = sweep_m(report.p_ngs_analytic, p_hd, cfg.n_inputs, _parse_m_range(args.m_range))
        out = os.path.join(run_dir, "sweep.csv")
        with open(out, "w", encoding="ascii") as fh:
            fh.write("m_units,p_total\n")
            for m, p in curve:
                fh.write(f"{m},{p:.12g}\n")
        wrote_any = True
        print(f"wrote {out}")

    print(f"run dir {run_dir}")
    return EXIT_OK


def _overrides(args):
    return {
        "seed": args.seed,
        "trials": args.trials,
    }


class _Parser(argparse.ArgumentParser):
    """Argument errors are configuration errors (exit code 1, not 2)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"config error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def build_parser():
    parser = _Parser(
        prog="gkpsim",
        description="Adaptive heralded grid-qubit generation simulator",
    )
    parser.add_argument("--version", action="version", version=f"gkpsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="JSON config path")
        p.add_argument("--out", default="runs", help="base output directory")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--trials", type=int, default=None, help="override conditioned trial count")
        p.add_argument(
            "--workers",
            type=int,
            default=os.cpu_count() or 1,
            help="worker processes for trial batches",
        )

    p = sub.add_parser("gps-dist", help="photon-number distribution table")
    common(p)
    p.set_defaults(func=cmd_gps_dist)

    p = sub.add_parser("solve", help="solve unit parameters")
    common(p)
    p.add_argument("--scan-c", action="store_true", help="coarse envelope-exponent scan")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("simulate", help="two-phase Monte Carlo run")
    common(p)
    p.add_argument("--trace", action="store_true", help="write per-trial trace JSONL")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("waveplot", help="plot-ready data files")
    common(p)
    p.add_argument(
        "--mode",
        required=True,
        choices=("overlay-chi", "overlay-sensor", "scatter", "sweep"),
    )
    p.add_argument("--m-range", default="5..40", help="sweep range A..B")
    p.add_argument("--max-traces", type=int, default=50, help="overlay state cap")
    p.set_defaults(func=cmd_waveplot)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit:
        raise
    except ConfigurationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GkpSimError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
