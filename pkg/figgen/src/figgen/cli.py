"""figgen <figure-id> --data <dir> --out <file>"""

from __future__ import annotations

import argparse
import sys

from .csvio import FigureInputError
from .figures import FIGURES, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figgen",
        description="Render figure reproductions from asymrabi CSV outputs.",
    )
    parser.add_argument("figure_id", choices=sorted(FIGURES),
                        help="which figure to render")
    parser.add_argument("--data", required=True,
                        help="directory holding the input CSV files")
    parser.add_argument("--out", required=True, help="output image path")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        render(args.figure_id, args.data, args.out)
    except FigureInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
