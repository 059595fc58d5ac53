"""Command line entry point: ``radiohit run|verify-family|check-consistency|summarize``."""

from __future__ import annotations

import argparse
import json
import sys

from .families import FamilyError, SetFamily, min_hitting_family_size, verify_hit_fraction
from .harness import (ConfigError, ExperimentConfig, read_csv, run_checks, run_experiment, summarize,
                      summary_json, write_csv)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VIOLATION = 3


def cmd_run(args) -> int:
    cfg = ExperimentConfig.load(args.config)
    rows = run_experiment(cfg, jobs=args.jobs)
    out = args.output or cfg.output
    if out:
        with open(out, "w", newline="") as fh:
            write_csv(rows, fh)
    else:
        write_csv(rows, sys.stdout)
    if args.summary:
        with open(args.summary, "w") as fh:
            fh.write(summary_json(summarize(rows)) + "\n")
    return EXIT_OK


def cmd_verify_family(args) -> int:
    try:
        family = SetFamily.load(args.family)
    except (OSError, ValueError, KeyError) as exc:
        raise ConfigError(f"cannot read family {args.family}: {exc}") from None
    try:
        cert = verify_hit_fraction(family, limit=args.limit, sampled=args.sampled,
                                   samples=args.samples, seed=args.seed)
    except FamilyError as exc:
        raise ConfigError(str(exc)) from None
    report = {"property2": cert.to_json(), "duplicates": family.has_duplicates}
    if args.min_hitting:
        bound = min_hitting_family_size(family, args.budget)
        report["property1"] = {"min_hitting_size": bound.size, "exact": bound.exact}
    print(json.dumps(report, indent=2))
    if args.max_fraction is not None and cert.max_hit_fraction > args.max_fraction:
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_check(args) -> int:
    cfg = ExperimentConfig.load(args.config)
    results = run_checks(cfg)
    bad = [r for r in results if not r.ok]
    for r in bad[: args.show]:
        print(r)
    print(f"{len(results) - len(bad)}/{len(results)} checks passed")
    return EXIT_VIOLATION if bad else EXIT_OK


def cmd_summarize(args) -> int:
    try:
        with open(args.results, newline="") as fh:
            rows = read_csv(fh)
    except OSError as exc:
        raise ConfigError(str(exc)) from None
    try:
        print(summary_json(summarize(rows)))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="radiohit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a seeded experiment and write CSV rows")
    p.add_argument("config")
    p.add_argument("-o", "--output", help="CSV path (default: config 'output', else stdout)")
    p.add_argument("--summary", help="also write a JSON summary here")
    p.add_argument("-j", "--jobs", type=int, default=1)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify-family", help="certify the hit fraction of a set family")
    p.add_argument("family")
    p.add_argument("--limit", type=int, default=16, help="largest l verified exhaustively")
    p.add_argument("--sampled", action="store_true", help="allow a sampled certificate above the limit")
    p.add_argument("--samples", type=int, default=20000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-hitting", action="store_true", help="also compute the smallest hitting family")
    p.add_argument("--budget", type=int, default=None, help="search node budget for --min-hitting")
    p.add_argument("--max-fraction", type=float, default=None, help="exit 3 if the max fraction exceeds this")
    p.set_defaults(func=cmd_verify_family)

    p = sub.add_parser("check-consistency", help="check players against their target executions")
    p.add_argument("config")
    p.add_argument("--show", type=int, default=20, help="violations to print")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("summarize", help="summarize a results CSV as JSON")
    p.add_argument("results")
    p.set_defaults(func=cmd_summarize)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"radiohit: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
