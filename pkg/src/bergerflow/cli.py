"""Command-line entry point.

Subcommands: run, sweep, oracle-check, report.  Exit codes: 0 ok, 1 config,
2 validation, 3 numerical halt before any singularity indication,
4 resolution.  BERGER_FLOW_WORKERS overrides the sweep worker count.
"""

from __future__ import annotations

import argparse
import os
import sys

from .config import ConfigError, load_config
from .runner import EXIT_CONFIG, oracle_check, run_config, run_sweep


def _load(path: str):
    try:
        return load_config(path), None
    except ConfigError as err:
        return None, f"{path}: {err}"
    except OSError as err:
        return None, str(err)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="bergerflow",
        description="Ricci flow of warped Berger metrics: runs, sweeps, checks, reports")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="single flow run with diagnostics")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", default=None, help="output directory (default: config output.dir)")

    p_sweep = sub.add_parser("sweep", help="parameter sweep over a config grid")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--workers", type=int, default=1)
    p_sweep.add_argument("--out", default=None)

    p_oracle = sub.add_parser("oracle-check", help="curvature oracle and residual convergence")
    p_oracle.add_argument("--config", required=True)

    p_report = sub.add_parser("report", help="render tables and figures for a finished run")
    p_report.add_argument("--out", required=True, help="run directory holding series.csv")

    args = parser.parse_args(argv)

    if args.command == "report":
        from .report import render_report

        path = render_report(args.out)
        print(f"wrote {path}")
        return 0

    cfg, err = _load(args.config)
    if cfg is None:
        print(err, file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "run":
        code, message, _ = run_config(cfg, args.out)
        print(message, file=sys.stderr if code else sys.stdout)
        return code

    if args.command == "sweep":
        workers = args.workers
        env = os.environ.get("BERGER_FLOW_WORKERS")
        if env:
            try:
                workers = int(env)
            except ValueError:
                print(f"BERGER_FLOW_WORKERS must be an integer, got {env!r}",
                      file=sys.stderr)
                return EXIT_CONFIG
        code, rows = run_sweep(cfg, max(1, workers), args.out)
        print(f"sweep finished: {len(rows)} points")
        return code

    code, text = oracle_check(cfg)
    print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
