"""Command line: figures --recipe <id> --in <csv...> --out <path>."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .recipes import FIGURE_IDS, FigureRecipe, RecipeError, render


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="figures",
        description="Regenerate paper-style figures from sweep CSV output")
    ap.add_argument("--recipe", required=True, choices=FIGURE_IDS,
                    help="figure id")
    ap.add_argument("--in", dest="inputs", type=Path, nargs="+", required=True,
                    help="input CSV file(s)")
    ap.add_argument("--out", type=Path, required=True,
                    help="output image path (.png or .svg)")
    ap.add_argument("--dpi", type=int, default=150)
    ap.add_argument("--cmap", default="viridis")
    ap.add_argument("--label", dest="labels", action="append", default=[],
                    help="legend label per input (phmax recipe)")
    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    recipe = FigureRecipe(figure_id=args.recipe, inputs=list(args.inputs),
                          output=args.out, dpi=args.dpi, cmap=args.cmap,
                          labels=args.labels)
    try:
        path = render(recipe)
    except RecipeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
