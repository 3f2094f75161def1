"""Command line entry point: ``ldpids run``, ``ldpids replay``, ``ldpids bench``."""
from __future__ import annotations

import argparse
import sys

from .errors import ConfigError, DatasetLoadError, LdpidsError, MissingMetadata
from . import harness


def _cmd_run(args) -> int:
    try:
        config = harness.load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return harness.EXIT_CONFIG
    if args.workers:
        config.workers = args.workers
    try:
        result = harness.run_experiment(config, args.out, fail_fast=args.fail_fast)
    except LdpidsError as exc:  # invalid run parameters surface here
        print(f"config error: {exc}", file=sys.stderr)
        return harness.EXIT_CONFIG
    if result.exit_code == harness.EXIT_DATASET:
        print(f"dataset load error: {result.message}", file=sys.stderr)
    elif result.exit_code == harness.EXIT_VIOLATION:
        print(result.message, file=sys.stderr)
    print(f"{len(result.outputs)} runs written to {result.out_dir}")
    return result.exit_code


def _cmd_replay(args) -> int:
    try:
        res = harness.replay(args.run_id, args.dir, args.out, args.seed)
    except MissingMetadata as exc:
        print(f"missing metadata: {exc}", file=sys.stderr)
        return harness.EXIT_CONFIG
    except DatasetLoadError as exc:
        print(f"dataset load error: {exc}", file=sys.stderr)
        return harness.EXIT_DATASET
    if res.identical:
        print(f"{res.run_id}: identical ({res.out_dir})")
        return 0
    print(f"{res.run_id}: differs in {', '.join(res.mismatched)} ({res.out_dir})")
    return 1


def _cmd_bench(args) -> int:
    from .bench import main as bench_main

    bench_main(["--repeat", str(args.repeat)])
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ldpids", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a config's run matrix")
    run.add_argument("config")
    run.add_argument("--out", help="output directory (overrides the config's out)")
    run.add_argument("--workers", type=int, help="parallel processes")
    mode = run.add_mutually_exclusive_group()
    mode.add_argument("--fail-fast", dest="fail_fast", action="store_true", default=True,
                      help="stop at the first audit violation (default)")
    mode.add_argument("--keep-going", dest="fail_fast", action="store_false",
                      help="finish every run even after a violation")
    run.set_defaults(func=_cmd_run)

    rep = sub.add_parser("replay", help="re-execute one run and compare checksums")
    rep.add_argument("run_id")
    rep.add_argument("dir", help="directory holding run_<run_id>.json")
    rep.add_argument("--out", help="where to write replayed files (default <dir>/replay)")
    rep.add_argument("--seed", type=int, help="override the recorded seed")
    rep.set_defaults(func=_cmd_replay)

    bench = sub.add_parser("bench", help="time compiled against pure-Python kernels")
    bench.add_argument("--repeat", type=int, default=5)
    bench.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
