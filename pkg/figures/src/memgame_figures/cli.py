"""Command line for rendering experiment CSVs into figures.

    memgame-figures render --kind phase2d --in traj_000.csv traj_001.csv \
        --out phase.png [--ref 0.5 0.5] [--no-time-color] [--title TEXT]
"""

from __future__ import annotations

import argparse
import sys

from .csvio import SchemaError
from .render import KINDS, PlotJob, render


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="memgame-figures", exit_on_error=False)
    sub = parser.add_subparsers(dest="command", required=True)
    r = sub.add_parser("render", help="render CSVs to an image", exit_on_error=False)
    r.add_argument("--kind", required=True, choices=KINDS)
    r.add_argument("--in", dest="inputs", required=True, nargs="+",
                   help="input CSV file(s)")
    r.add_argument("--out", required=True, help="output image path")
    r.add_argument("--no-time-color", action="store_true",
                   help="plain per-trajectory colors instead of time gradient")
    r.add_argument("--ref", type=float, nargs="+", default=None,
                   help="reference equilibrium marker: x y (phase kinds) or "
                        "x_1..x_m y_1..y_m (simplex)")
    r.add_argument("--title", default=None)
    return parser


def _reference(args):
    if args.ref is None:
        return None
    if args.kind == "simplex":
        if len(args.ref) % 2 != 0:
            raise SchemaError("--ref for simplex needs x_1..x_m y_1..y_m")
        half = len(args.ref) // 2
        return (args.ref[:half], args.ref[half:])
    if len(args.ref) != 2:
        raise SchemaError("--ref needs exactly two numbers: x y")
    return tuple(args.ref)


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except (argparse.ArgumentError, SystemExit) as exc:
        if isinstance(exc, SystemExit):
            return 0 if exc.code in (0, None) else 1
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        job = PlotJob(inputs=args.inputs, kind=args.kind, out=args.out,
                      color_by_time=not args.no_time_color,
                      reference=_reference(args), title=args.title)
        render(job)
        print(f"wrote {args.out}")
        return 0
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
