"""Command-line front end: plot <panel-id> --in DIR --out FILE."""
from __future__ import annotations

import argparse
import sys

from .errors import PanelError
from .panels import PANELS, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plot",
        description="Render a figure panel from simulator CSV outputs.",
    )
    parser.add_argument("panel", metavar="panel-id",
                        help=f"one of: {', '.join(sorted(PANELS))}")
    parser.add_argument("--in", dest="in_dir", required=True,
                        help="directory holding the simulator CSV outputs")
    parser.add_argument("--out", dest="out_file", required=True,
                        help="image file to write (.png, .pdf, .svg)")
    args = parser.parse_args(argv)
    try:
        path = render(args.panel, args.in_dir, args.out_file)
    except PanelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
