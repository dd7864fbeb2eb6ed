"""Command-line entry: ``mflab-plots <kind> input.csv [...] -o figure.png``."""

from __future__ import annotations

import argparse
import sys

from .render import KINDS, MissingColumnError, PlotSpec, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="mflab-plots", description=__doc__)
    parser.add_argument("kind", choices=sorted(KINDS))
    parser.add_argument("inputs", nargs="+", help="CSV file(s) from the simulation CLI")
    parser.add_argument("-o", "--output", required=True, help="image path (.png/.svg)")
    parser.add_argument("--title", default=None)
    parser.add_argument("--dpi", type=int, default=150)
    args = parser.parse_args(argv)
    try:
        out = render(PlotSpec(kind=args.kind, inputs=tuple(args.inputs),
                              output=args.output, title=args.title, dpi=args.dpi))
    except (MissingColumnError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
