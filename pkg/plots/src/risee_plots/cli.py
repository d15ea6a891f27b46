"""Command line for rendering sweep figures.

    plot --in results.agg.csv --panel ee --axis budget_ratio --out fig.svg

Exit codes: 0 figure written, 2 bad arguments or bad data.
"""

from __future__ import annotations

import argparse
import sys

from .render import AXIS_LABELS, PANELS, SCHEME_LABELS, FigureSpec, render

EXIT_OK = 0
EXIT_ERROR = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plot",
        description="Render an errorbar figure from risee aggregate sweep CSVs.",
    )
    parser.add_argument(
        "--in",
        dest="inputs",
        action="append",
        required=True,
        metavar="CSV",
        help="aggregate CSV from `risee sweep --out` (repeatable)",
    )
    parser.add_argument("--panel", choices=sorted(PANELS), default="ee")
    parser.add_argument("--axis", choices=sorted(AXIS_LABELS), default="budget_ratio")
    parser.add_argument("--out", required=True, metavar="IMAGE", help="output image path")
    parser.add_argument(
        "--scheme",
        action="append",
        default=None,
        metavar="S",
        help="restrict to this scheme (repeatable); default: all schemes in the data",
    )
    parser.add_argument("--title", default="", help="figure title override")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    series = {s: SCHEME_LABELS.get(s, s) for s in args.scheme} if args.scheme else {}
    try:
        spec = FigureSpec(
            csv_paths=tuple(args.inputs),
            out_path=args.out,
            panel=args.panel,
            axis=args.axis,
            series=series,
            title=args.title,
        )
        warnings = render(spec)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    for line in warnings:
        print(f"warning: {line}")
    print(f"wrote {args.out}")
    return EXIT_OK


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
