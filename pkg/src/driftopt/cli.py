"""driftopt command line: run, replay, report, dump-chunks."""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import seeding
from .config import ConfigError, ExperimentConfig, apply_overrides, load_config, normalize_variant
from .data import read_chunk_stream, write_chunk_stream
from .harness import (
    dump_chunks,
    format_table,
    read_results_csv,
    replay_variant,
    run_experiment,
    summarize,
    write_results_csv,
    write_summary_csv,
)

SEED_ENV = "DRIFTOPT_SEED"


class CliError(Exception):
    pass


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="experiment config (JSON)")
    p.add_argument("--seed", type=int, help=f"master seed (falls back to ${SEED_ENV}, then the config)")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help="override a config value, e.g. de.generations=50 (repeatable)")
    p.add_argument("--max-history", type=int, help="keep at most this many past chunks")
    p.add_argument("--rmse-eval", choices=["current", "transferred"])
    p.add_argument("--sampling", choices=["lhs", "uniform"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="driftopt", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment from a config file")
    _common(run)
    run.add_argument("--out", type=Path, required=True, help="output directory")
    run.add_argument("--parallelism", type=int, default=1)

    replay = sub.add_parser("replay", help="run one variant against a dumped chunk stream")
    _common(replay)
    replay.add_argument("chunks", type=Path, help="chunk stream (newline-delimited JSON)")
    replay.add_argument("--variant", required=True)
    replay.add_argument("--problem", required=True, help="problem id the stream was dumped for")
    replay.add_argument("--run", type=int, default=0, help="run index the stream was dumped for")
    replay.add_argument("--out", type=Path, required=True, help="output directory")

    report = sub.add_parser("report", help="summarize an existing results CSV")
    report.add_argument("results", type=Path)

    dump = sub.add_parser("dump-chunks", help="write the chunk stream of one problem/run")
    _common(dump)
    dump.add_argument("--problem", required=True)
    dump.add_argument("--run", type=int, default=0)
    dump.add_argument("--out", type=Path, required=True, help="output file")
    return parser


def resolve_config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    overrides = list(args.overrides)
    if args.max_history is not None:
        overrides.append(f"ensemble.max_history={args.max_history}")
    if args.rmse_eval:
        overrides.append(f"ensemble.rmse_eval={args.rmse_eval}")
    if args.sampling:
        overrides.append(f"protocol.sampling={args.sampling}")
    seed = args.seed
    if seed is None and os.environ.get(SEED_ENV):
        try:
            seed = int(os.environ[SEED_ENV])
        except ValueError:
            raise CliError(f"${SEED_ENV} is not an integer") from None
    if seed is not None:
        overrides.append(f"seed={seed}")
    return apply_overrides(cfg, overrides)


def _out_dir(path: Path) -> Path:
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(f"cannot create output directory {path}: {exc.strerror}") from exc
    if not os.access(path, os.W_OK):
        raise CliError(f"output directory {path} is not writable")
    return path


def cmd_run(args) -> int:
    if args.parallelism < 1:
        raise CliError("--parallelism must be >= 1")
    cfg = resolve_config(args)
    out = _out_dir(args.out)
    report = run_experiment(cfg, parallelism=args.parallelism)
    with open(out / "results.csv", "w", newline="") as fh:
        write_results_csv(report.records, fh)
    rows = summarize(report.records) if report.records else []
    with open(out / "summary.csv", "w", newline="") as fh:
        write_summary_csv(rows, fh)
    if rows:
        print(format_table(rows, cfg.problems, cfg.variants), end="")
    for (p, v, r), msg in sorted(report.failures.items()):
        print(f"FAILED {p}/{v} run {r}: {msg}", file=sys.stderr)
    return 1 if report.failures else 0


def cmd_replay(args) -> int:
    cfg = resolve_config(args)
    variant = normalize_variant(args.variant)
    if variant not in cfg.variants and variant not in ("SS", "KTS", "KTSPI", "KTSPI_TBA"):
        raise CliError(f"unknown variant {args.variant!r}")
    seed = seeding.run_seed(cfg.seed, args.problem, args.run)
    out = _out_dir(args.out)
    with open(args.chunks) as fh:
        record = replay_variant(variant, read_chunk_stream(fh), cfg, seed, run=args.run,
                                problem_id=args.problem)
    with open(out / "replay.csv", "w", newline="") as fh:
        write_results_csv([record], fh)
    return 0


def cmd_report(args) -> int:
    with open(args.results, newline="") as fh:
        records = read_results_csv(fh)
    print(format_table(summarize(records)), end="")
    return 0


def cmd_dump(args) -> int:
    cfg = resolve_config(args)
    seed = seeding.run_seed(cfg.seed, args.problem, args.run)
    chunks = dump_chunks(args.problem, cfg, seed)
    if args.out.parent != Path(""):
        _out_dir(args.out.parent)
    with open(args.out, "w") as fh:
        write_chunk_stream(chunks, fh)
    return 0


COMMANDS = {"run": cmd_run, "replay": cmd_replay, "report": cmd_report, "dump-chunks": cmd_dump}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits 2 with usage on bad flags
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (CliError, ConfigError, ValueError, OSError) as exc:
        msg = " ".join(str(exc).split())
        print(f"driftopt: error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
