"""Command-line front end.

Subcommands:
    run       one match: events.csv, summary.csv, channels.csv, fusion.csv
    sweep     full experiment from a config file
    table1    gap-statistics table from a sweep.csv
    table2    multi-view breakdown table from a sweep.csv
    fuse      fusion verdicts from an existing channels.csv
    scenario  edge-vs-cloud energy/bandwidth comparison

Exit codes: 0 success, 1 validation error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import harness
from .drones import STRATEGIES
from .errors import SwarmSimError
from .fusion import scenario_sweep
from .params import ModelParams


def _parse_int_list(raw: str) -> list[int]:
    try:
        return [int(chunk) for chunk in raw.split(",") if chunk.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad integer list {raw!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swarmsim",
        description="Rugby-match collision simulator with a UAV observer swarm.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a single match and write its CSVs")
    p_run.add_argument("--strategy", required=True, choices=STRATEGIES)
    p_run.add_argument("--drones", type=int, required=True)
    p_run.add_argument("--ticks", type=int, default=1800)
    p_run.add_argument("--seed", type=int, default=42)
    p_run.add_argument("--out", required=True)

    p_sweep = sub.add_parser("sweep", help="run the full experiment sweep")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--reps", type=int, default=None,
                         help="override the config's repetition count")
    p_sweep.add_argument("--out", default=None,
                         help="override the config's output directory")
    p_sweep.add_argument("--quiet", action="store_true")

    p_t1 = sub.add_parser("table1", help="gap statistics per strategy")
    p_t1.add_argument("--in", dest="infile", required=True)

    p_t2 = sub.add_parser("table2", help="multi-view breakdown at drone counts")
    p_t2.add_argument("--in", dest="infile", required=True)
    p_t2.add_argument("--counts", type=_parse_int_list, default=[1, 4, 10, 20])

    p_fuse = sub.add_parser("fuse", help="fuse channel samples per event")
    p_fuse.add_argument("--in", dest="infile", required=True)
    p_fuse.add_argument("--threshold", type=float, default=0.5)

    p_sc = sub.add_parser("scenario", help="edge vs cloud scenario table")
    p_sc.add_argument("--counts", type=_parse_int_list, default=[1, 4, 10, 20])

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            model = ModelParams()
            artifacts = harness.run_single(
                model, args.strategy, args.drones, args.seed, args.ticks,
                args.out,
            )
            c = artifacts.counts
            print(
                f"{args.strategy} n={args.drones} seed={args.seed}: "
                f"{c.total} collisions, {c.seen_ge1} seen, "
                f"{c.seen_ge2} multi-view -> {args.out}"
            )
        elif args.command == "sweep":
            config = harness.load_config(args.config)
            updates: dict[str, object] = {}
            if args.reps is not None:
                updates["reps"] = args.reps
            if args.out is not None:
                updates["output_dir"] = Path(args.out)
            if updates:
                config = harness.ExperimentConfig(
                    **{
                        **{
                            "strategies": config.strategies,
                            "drone_counts": config.drone_counts,
                            "reps": config.reps,
                            "ticks": config.ticks,
                            "master_seed": config.master_seed,
                            "output_dir": config.output_dir,
                            "overrides": config.overrides,
                            "common_random_numbers": config.common_random_numbers,
                            "write_events": config.write_events,
                        },
                        **updates,
                    }
                )
            progress = None
            if not args.quiet:
                def progress(strategy: str, n: int, reps: int) -> None:
                    print(f"done {strategy} n={n} ({reps} reps)", flush=True)
            harness.run_sweep(config, progress=progress)
            print(f"sweep written to {config.output_dir}")
        elif args.command == "table1":
            records = harness.load_sweep(args.infile)
            sys.stdout.write(harness.emit_table1(records))
        elif args.command == "table2":
            records = harness.load_sweep(args.infile)
            sys.stdout.write(harness.emit_table2(records, args.counts))
        elif args.command == "fuse":
            samples = harness.load_channels(args.infile)
            fused = harness.fuse_run(samples, args.threshold)
            sys.stdout.write(harness.emit_fusion(samples, fused))
        elif args.command == "scenario":
            model = ModelParams()
            records = scenario_sweep(
                args.counts, model.energy, model.link,
                control_bits=model.control_channel_bits,
            )
            sys.stdout.write(harness.emit_scenario(records))
    except (SwarmSimError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
