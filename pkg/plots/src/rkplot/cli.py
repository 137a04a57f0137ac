"""Command line: plot {trace|phase|converge} --in ... [--frontier ...] --out ...

Exit codes: 0 success, 2 usage error, 3 unreadable or schema-mismatched
input (no image is emitted in that case).
"""

from __future__ import annotations

import argparse
import sys

from .io import SchemaError
from .render import render_heatmap, render_trace

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 2, 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rkplot", description=__doc__)
    sub = parser.add_subparsers(dest="command", metavar="{trace,phase,converge}")
    sub.required = True

    trace = sub.add_parser("trace", help="log-scale stability traces, one curve per input")
    trace.add_argument("--in", dest="inputs", action="append", required=True, metavar="CSV")
    trace.add_argument("--out", required=True)

    for name in ("phase", "converge"):
        p = sub.add_parser(name, help=f"{name} heatmap over (sigma_r, sigma_i)")
        p.add_argument("--in", dest="inputs", action="append", required=True, metavar="CSV")
        p.add_argument("--frontier", default=None, metavar="CSV")
        p.add_argument("--out", required=True)
    return parser


def main(argv=None) -> int:
    try:
        ns = _build_parser().parse_args(sys.argv[1:] if argv is None else argv)
    except SystemExit as exc:  # argparse already printed the message
        return int(exc.code or 0)
    try:
        if ns.command == "trace":
            render_trace(ns.inputs, ns.out)
        else:
            if len(ns.inputs) != 1:
                print("rkplot: error: heatmaps take exactly one --in file", file=sys.stderr)
                return EXIT_USAGE
            render_heatmap(ns.inputs[0], ns.out, frontier_path=ns.frontier)
    except (SchemaError, OSError) as exc:
        print(f"rkplot: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
