"""plots command line: render one figure from one CSV."""

import argparse
import sys
from pathlib import Path

from .figures import KINDS, FigureSpec, SchemaError, render


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="plots",
        description="Render figures from mpisac CSV output.")
    ap.add_argument("kind", choices=KINDS)
    ap.add_argument("--in", dest="src", required=True, metavar="CSV",
                    help="input CSV written by the mpisac tool")
    ap.add_argument("--out", required=True, metavar="IMAGE",
                    help="output image path")
    ap.add_argument("--format", choices=("svg", "png"), default=None,
                    help="default: taken from the --out suffix, else svg")
    ap.add_argument("--dpi", type=int, default=150,
                    help="raster resolution for png output (default 150)")
    ap.add_argument("--xlabel", help="override the x axis label")
    ap.add_argument("--ylabel", help="override the y axis label")
    args = ap.parse_args(argv)
    if args.dpi < 1:
        ap.error(f"--dpi must be positive, got {args.dpi}")

    spec = FigureSpec(src=Path(args.src), kind=args.kind,
                      out=Path(args.out),
                      xlabel=args.xlabel, ylabel=args.ylabel)
    try:
        render(spec, fmt=args.format, dpi=args.dpi)
    except (SchemaError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
