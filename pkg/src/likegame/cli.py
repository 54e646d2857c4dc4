"""Command-line entry point: ``likegame run | sweep | verify | plot``.

Exit codes: 0 ok, 1 fatal config violation, 2 IO failure, 3 sweep with
failed runs, 4 claim failure, 5 unknown metric or no data to plot.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_SWEEP, EXIT_CLAIM, EXIT_PLOT = 0, 1, 2, 3, 4, 5


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def cmd_run(args) -> int:
    from likegame.engine import ConfigError, run_game
    from likegame.io import ConfigFormatError, load_config, write_run

    try:
        config = load_config(args.config)
    except OSError as exc:
        _err(f"cannot read config: {exc}")
        return EXIT_IO
    except ConfigFormatError as exc:
        _err(f"config violation: {exc}")
        return EXIT_CONFIG
    try:
        trace = run_game(config, args.seed)
    except ConfigError as exc:
        for v in exc.report.fatal:
            _err(f"config violation: {v.message}")
        return EXIT_CONFIG
    try:
        write_run(trace, args.out)
    except OSError as exc:
        _err(f"cannot write output: {exc}")
        return EXIT_IO
    print(f"wrote {args.out}/trace.jsonl, metrics.csv, summary.json")
    return EXIT_OK


def cmd_sweep(args) -> int:
    from likegame.sweep import SweepSpecError, load_spec, run_sweep

    try:
        spec = load_spec(args.spec)
        rows, agg = run_sweep(spec, args.workers)
    except OSError as exc:
        _err(f"sweep IO failure: {exc}")
        return EXIT_IO
    except SweepSpecError as exc:
        _err(f"sweep spec violation: {exc}")
        return EXIT_CONFIG
    failed = [r for r in rows if r["status"] != "ok"]
    for r in failed:
        _err(f"{r['run']} failed: {r['error']}")
    print(f"{len(rows)} runs, {len(failed)} failed; aggregate at {agg}")
    return EXIT_SWEEP if failed else EXIT_OK


def cmd_verify(args) -> int:
    from likegame.claims import format_table, run_claims

    results = run_claims(args.claim or None)
    print(format_table(results))
    failed = [r.name for r in results if not r.passed]
    if failed:
        _err("failed claims: " + ", ".join(failed))
        return EXIT_CLAIM
    return EXIT_OK


def cmd_plot(args) -> int:
    from likegame.plot import PlotError, plot_file

    try:
        n = plot_file(args.input, args.metric, args.out)
    except PlotError as exc:
        _err(str(exc))
        return exc.code
    print(f"wrote {args.out} ({n} series)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    from likegame.claims import CLAIMS

    parser = argparse.ArgumentParser(prog="likegame", description="Repeated content-sharing game simulator.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate one configuration")
    p.add_argument("--config", required=True, help="config JSON path")
    p.add_argument("--seed", type=int, default=None, help="override the config's rng_seed")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="run a parameter sweep")
    p.add_argument("--spec", required=True, help="sweep spec JSON path")
    p.add_argument("--workers", type=int, default=None, help="worker processes (default: LIKEGAME_WORKERS or CPU count)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run the canned claim checks")
    p.add_argument("--claim", action="append", choices=sorted(CLAIMS), help="run only this claim (repeatable)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("plot", help="write an SVG chart of one metric")
    p.add_argument("--in", dest="input", required=True, help="trace.jsonl or aggregate.csv")
    p.add_argument("--metric", required=True)
    p.add_argument("--out", required=True, help="output .svg path")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
