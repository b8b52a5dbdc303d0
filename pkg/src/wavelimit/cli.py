"""Command-line front end.

Subcommands: riemann, ansatz, residuals, ns-run, ns-sweep, bgk-run,
bgk-sweep, check-bound.  Each takes --config <path> (the documented
`key = value` file) and --out <dir>.  Exit codes: 0 success, 1 domain or
configuration error, 2 numerical abort.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bgk, harness, ns, profiles, riemann
from .errors import ConfigError


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as ConfigError (exit 1)."""

    def error(self, message):
        raise ConfigError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="wavelimit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("riemann", "print the solved wave pattern; sample profiles to CSV"),
        ("ansatz", "sample the superposed approximate pattern to CSV"),
        ("residuals", "emit the ansatz residual fields Q1/Q2 to CSV"),
        ("ns-run", "single Navier-Stokes run (first epsilon of the list)"),
        ("ns-sweep", "Navier-Stokes epsilon sweep + convergence report"),
        ("bgk-run", "single kinetic run (first epsilon of the list)"),
        ("bgk-sweep", "kinetic epsilon sweep + convergence report"),
        ("check-bound", "ansatz-vs-Riemann bound ledger"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="key = value config file")
        p.add_argument("--out", default=None, help="output directory")
        if name == "bgk-run":
            p.add_argument("--dump-f", action="store_true",
                           help="also dump the full (x, xi1) distributions")
    return parser


def _out_dir(args, config) -> Path:
    out = Path(args.out) if args.out is not None else Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_riemann(args, config):
    pattern = harness.pattern_for(config)
    print(json.dumps(pattern.to_dict(), indent=2, sort_keys=True))
    if args.out is not None:
        out = _out_dir(args, config)
        eps = config.eps_list[0]
        grid = harness.grid_for(config, eps, pattern,
                                harness.profile_config_for(config, eps, pattern).sigma)
        x = grid.centers()
        for t in [t for t in config.times_to_record() if t > 0.0]:
            v, u, th = riemann.eval_riemann_fields(pattern, t, x, config.params)
            harness.write_profile_csv(out / harness.snapshot_name("riemann", eps, t),
                                      t, x, v, u, th)
    return 0


def _cmd_ansatz(args, config):
    out = _out_dir(args, config)
    pattern = harness.pattern_for(config)
    for eps in config.eps_list:
        cfg = harness.profile_config_for(config, eps, pattern)
        grid = harness.grid_for(config, eps, pattern, cfg.sigma)
        x = grid.centers()
        for t in config.times_to_record():
            v, u, th = profiles.superpose_fields(t, x, cfg, config.params)
            harness.write_profile_csv(out / harness.snapshot_name("ansatz", eps, t),
                                      t, x, v, u, th)
    return 0


def _cmd_residuals(args, config):
    out = _out_dir(args, config)
    pattern = harness.pattern_for(config)
    for eps in config.eps_list:
        cfg = harness.profile_config_for(config, eps, pattern)
        dx = min(eps / config.dx_per_eps, cfg.sigma / 8.0)
        grid_full = harness.grid_for(config, eps, pattern, cfg.sigma)
        n = max(16, int((grid_full.x_max - grid_full.x_min) / dx))
        grid = ns.Grid(grid_full.x_min, grid_full.x_min + n * dx, n)
        for t in [t for t in config.times_to_record() if t > 0.0]:
            q1, q2 = profiles.ansatz_residuals(cfg, config.params, grid, t)
            harness.write_residuals_csv(out / harness.snapshot_name("residuals", eps, t),
                                        t, grid.centers(), q1, q2)
    return 0


def _cmd_ns_run(args, config):
    out = _out_dir(args, config)
    eps = config.eps_list[0]
    snaps, *_ = harness.run_ns_entry(config, eps)
    for s in snaps:
        harness.write_snapshot_csv(out / harness.snapshot_name("ns", eps, s.t), s)
    return 0


def _cmd_bgk_run(args, config):
    out = _out_dir(args, config)
    eps = config.eps_list[0]
    snaps, pattern, cfg, grid, vgrid = harness.run_bgk_entry(config, eps)
    m_star = harness.global_maxwellian_for(pattern)
    for s in snaps:
        if s.t > 0.0:
            ref = riemann.eval_riemann_eulerian_fields(pattern, s.t, grid.centers(),
                                                       config.params)
            dist = bgk.weighted_distance_fields(s, ref, m_star, config.params.R)
        else:
            dist = np.zeros(grid.n)
        harness.write_kinetic_csv(out / harness.snapshot_name("bgk", eps, s.t), s, dist)
        if getattr(args, "dump_f", False):
            bgk.save_distribution(s, out / f"bgk_eps{harness._fmt(eps)}_t{harness._fmt(s.t)}.bin")
    return 0


def _cmd_sweep(args, config, prefix):
    out = _out_dir(args, config)
    report, snapshots = harness.sweep(config, keep_snapshots=True)
    report.save(out / f"{prefix}_report.json")
    for eps, snaps in snapshots.items():
        for s in snaps:
            if isinstance(s, ns.FieldState):
                harness.write_snapshot_csv(out / harness.snapshot_name(prefix, eps, s.t), s)
            else:
                harness.write_kinetic_csv(out / harness.snapshot_name(prefix, eps, s.t),
                                          s, np.zeros(s.grid.n))
    print(report.dumps(), end="")
    return 0


def _cmd_check_bound(args, config):
    out = _out_dir(args, config)
    pattern = harness.pattern_for(config)
    rows = []
    ts = [t for t in config.times_to_record() if t > 0.0]
    for eps in config.eps_list:
        rows.extend(harness.check_ansatz_bound(config, eps, ts, pattern))
    text = json.dumps(rows, indent=2, sort_keys=True) + "\n"
    (out / "bound_checks.json").write_text(text, encoding="utf-8")
    print(text, end="")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        config = harness.load_config(args.config)
        if args.command == "riemann":
            return _cmd_riemann(args, config)
        if args.command == "ansatz":
            return _cmd_ansatz(args, config)
        if args.command == "residuals":
            return _cmd_residuals(args, config)
        if args.command == "ns-run":
            return _cmd_ns_run(args, config)
        if args.command == "ns-sweep":
            return _cmd_sweep(args, config, "ns")
        if args.command == "bgk-run":
            return _cmd_bgk_run(args, config)
        if args.command == "bgk-sweep":
            return _cmd_sweep(args, config, "bgk")
        if args.command == "check-bound":
            return _cmd_check_bound(args, config)
        raise ConfigError(f"unknown subcommand {args.command!r}")
    except ValueError as exc:  # includes ConfigError and domain errors
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except RuntimeError as exc:  # solver aborts, bracket failures
        print(f"numerical abort: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
