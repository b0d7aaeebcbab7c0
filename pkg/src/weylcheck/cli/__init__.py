"""Command-line entry point: ``weylcheck run [--config PATH] ...``.

Exit status: 0 when every check passes, 1 when any check fails, errors or is
indeterminate, 2 on usage or configuration errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Optional, Sequence

from ..catalog import CATALOG_NAMES
from .config import SUITES, ConfigError, SuiteConfig, load_config, parse_config
from .report import CheckRecord, Report
from .suites import ANCHORS, SuiteRunner, coverage_audit

__all__ = [
    "ANCHORS",
    "CheckRecord",
    "ConfigError",
    "Report",
    "SuiteConfig",
    "SuiteRunner",
    "build_parser",
    "coverage_audit",
    "load_config",
    "main",
    "parse_config",
    "run",
]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="weylcheck", description="Numerical verification suites for Weyl geometry.")
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="run verification suites and write a report")
    run_p.add_argument("--config", metavar="PATH", help="INI-style suite configuration")
    run_p.add_argument("--suite", action="append", metavar="NAME", help=f"suite to run ({', '.join(SUITES)}, all); repeatable")
    run_p.add_argument("--manifold", action="append", metavar="NAME", help="catalog entry to use; repeatable")
    run_p.add_argument("--grid", type=int, metavar="N", help="override every grid resolution with N points per axis")
    run_p.add_argument("--seed", type=int, metavar="S", help="random seed")
    run_p.add_argument("--points", type=int, metavar="P", help="random points per pointwise check")
    run_p.add_argument("--out", metavar="PATH", help="write the JSON report here")
    run_p.add_argument("--csv", metavar="PATH", help="also write a CSV residual table")
    run_p.add_argument("--format", choices=("json", "table"), help="format printed to stdout")
    sub.add_parser("list", help="list catalog entries, suites and anchors")
    return parser


def _apply_flags(cfg: SuiteConfig, args) -> SuiteConfig:
    if args.suite:
        cfg.suites = SUITES if "all" in args.suite else tuple(args.suite)
    if args.manifold:
        cfg.manifolds = tuple(args.manifold)
    if args.grid is not None:
        cfg.grids = {k: args.grid for k in cfg.grids}
    if args.seed is not None:
        cfg.seed = args.seed
    if args.points is not None:
        cfg.points = args.points
    if args.out:
        cfg.out = args.out
    if args.csv:
        cfg.csv = args.csv
    if args.format:
        cfg.format = args.format
    return cfg.validate()


def _write(path: str, text: str) -> None:
    tmp = f"{path}.partial"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def run(cfg: SuiteConfig, stdout=None) -> tuple[Report, int]:
    """Execute ``cfg``; write outputs; return the report and exit status."""
    stdout = stdout or sys.stdout
    flush = None
    if cfg.out:
        def flush(rep: Report) -> None:
            _write(cfg.out, rep.to_json())

    report = SuiteRunner(cfg).run(flush=flush)
    status = report.exit_status
    try:
        if cfg.out:
            _write(cfg.out, report.to_json())
        if cfg.csv:
            _write(cfg.csv, report.to_csv())
    except OSError as exc:
        print(f"weylcheck: cannot write {exc.filename}: {exc.strerror}", file=sys.stderr)
        status = max(status, 1)
    stdout.write(report.to_json() if cfg.format == "json" else report.to_table())
    return report, status


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "list":
        print("manifolds:", ", ".join(CATALOG_NAMES))
        print("suites:", ", ".join(SUITES + ("all",)))
        for key, text in ANCHORS.items():
            print(f"  {key}: {text}")
        return 0
    try:
        cfg = load_config(args.config) if args.config else SuiteConfig()
        cfg = _apply_flags(cfg, args)
    except ConfigError as exc:
        print(f"weylcheck: {exc}", file=sys.stderr)
        return 2
    try:
        _, status = run(cfg)
    except OSError as exc:
        print(f"weylcheck: I/O error on {exc.filename}: {exc.strerror}", file=sys.stderr)
        return 1
    return status
