"""plotgen command line: regenerate figures from benchmark CSVs.

Exit codes: 0 on success, 1 on schema or data errors and I/O failures.
"""
from __future__ import annotations

import argparse
import sys

from .csvio import CsvSchemaError, PlotDataError
from .plots import PlotSpec, plot_heatmap, plot_scatter


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plotgen", description=__doc__.splitlines()[0])
    subs = parser.add_subparsers(dest="command", required=True)
    for kind, blurb in (("scatter", "per-trial bound comparison panels"),
                        ("heatmap", "(p, theta) gap map with zero contour")):
        sub = subs.add_parser(kind, help=blurb)
        sub.add_argument("--in", dest="input_csv", required=True)
        sub.add_argument("--out", dest="output_image", required=True,
                         help="image path; .png (default rendering) or .svg")
        sub.add_argument("--dpi", type=int, default=200)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    spec = PlotSpec(input_csv=args.input_csv, kind=args.command,
                    output_image=args.output_image, dpi=args.dpi)
    try:
        if args.command == "scatter":
            result = plot_scatter(spec)
            print(f"wrote {result.output_image} ({len(result.panels)} panel(s))")
        else:
            result = plot_heatmap(spec)
            print(f"wrote {result.output_image} ({result.negative_points} negative grid points)")
        return 0
    except (CsvSchemaError, PlotDataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
