"""Command line: png renders of snapshots, drift curves, convergence tables."""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

EXIT_OK = 0
EXIT_ERROR = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trsw-plot",
        description="Plot solver output files (snapshots, diagnostics, tables).")
    sub = parser.add_subparsers(dest="command", required=True)

    f = sub.add_parser("field", help="raster one snapshot field")
    f.add_argument("path", help="snapshot file")
    f.add_argument("--field", default="h", help="field name (default: h)")
    f.add_argument("--projection", default="latlon",
                   choices=("latlon", "north", "south"),
                   help="sphere raster projection (plane snapshots ignore this)")
    f.add_argument("--samples", type=int, default=4,
                   help="raster samples per nodal spacing")
    f.add_argument("--out", default=None, help="output image path")

    d = sub.add_parser("diag", help="relative drift curves from diagnostics.csv")
    d.add_argument("path", help="diagnostics csv")
    d.add_argument("--out", default=None, help="output image path")

    c = sub.add_parser("conv", help="log-log error vs resolution from a table")
    c.add_argument("path", help="convergence csv")
    c.add_argument("--out", default=None, help="output image path")
    return parser


def main(argv=None) -> int:
    # render without a display; set before pyplot picks a backend
    os.environ.setdefault("MPLBACKEND", "Agg")
    args = _build_parser().parse_args(argv)

    from . import figures
    from .snapshot import SnapshotError, read_snapshot

    path = Path(args.path)
    try:
        if args.command == "field":
            snap = read_snapshot(path)
            fig = figures.plot_field(snap, field=args.field,
                                     projection=args.projection,
                                     samples=args.samples)
            out = args.out or f"{path.with_suffix('')}_{args.field}.png"
        elif args.command == "diag":
            fig = figures.plot_diagnostics(path)
            out = args.out or str(path.with_suffix(".png"))
        else:
            fig = figures.plot_convergence(path)
            out = args.out or str(path.with_suffix(".png"))
        fig.savefig(out, dpi=150, bbox_inches="tight")
    except (SnapshotError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    print(f"wrote {out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
