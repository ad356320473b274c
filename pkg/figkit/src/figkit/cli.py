"""The figkit entry point: batch figures from a sweep.csv."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .figures import FigkitError, FigureSpec, plot_breakdown, plot_coverage


def _parse_strategies(raw: str) -> tuple[str, ...]:
    return tuple(s.strip() for s in raw.split(",") if s.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figkit", description="Render figures from a swarmsim sweep.csv"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_cov = sub.add_parser("coverage", help="per-strategy coverage/diff curves")
    p_cov.add_argument("--in", dest="input_csv", required=True)
    p_cov.add_argument("--out", required=True)
    p_cov.add_argument(
        "--strategies", type=_parse_strategies, default=(),
        help="comma-separated subset; default: all strategies in the CSV",
    )

    p_brk = sub.add_parser("breakdown", help="stacked observer-count bands")
    p_brk.add_argument("--in", dest="input_csv", required=True)
    p_brk.add_argument("--out", required=True)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "coverage":
            spec = FigureSpec(
                input_csv=Path(args.input_csv),
                kind="coverage_curves",
                output=Path(args.out),
                strategies=tuple(args.strategies),
            )
            result = plot_coverage(spec)
            print(f"{len(result.series)} series -> {result.image} (+ {result.sidecar})")
        else:
            spec = FigureSpec(
                input_csv=Path(args.input_csv),
                kind="breakdown_stack",
                output=Path(args.out),
            )
            result = plot_breakdown(spec)
            print(f"{len(result.series)} panels -> {result.image} (+ {result.sidecar})")
    except FigkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
