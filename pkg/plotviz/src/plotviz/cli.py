"""Batch figure rendering: ``plot <recipe-name> --in <artifact-dir> --out <img>``."""

from __future__ import annotations

import argparse
import sys

from .recipes import BUILTIN_RECIPES
from .render import PlotvizError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plot",
        description="Render publication-style figures from experiment artifacts.",
    )
    parser.add_argument(
        "recipe",
        help="recipe name (mirrors the experiment names) or 'list'",
    )
    parser.add_argument("--in", dest="in_dir", default=".",
                        help="artifact directory of the experiment run")
    parser.add_argument("--out", dest="out_path", default=None,
                        help="output image path (default: <recipe>.svg)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.recipe == "list":
        for name in sorted(BUILTIN_RECIPES):
            print(name)
        return 0
    try:
        out = render(args.recipe, args.in_dir, args.out_path)
    except PlotvizError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
