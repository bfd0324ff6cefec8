"""`python -m tripodfigs --recipe fig1a.json` renders one figure."""

import argparse
import sys

from .recipes import RecipeError, load_recipe
from .render import RenderError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="tripodfigs",
        description="Render a figure recipe from tripod-lattice CSV files.")
    parser.add_argument("--recipe", required=True,
                        help="JSON recipe: figure id, inputs, out, "
                             "optional magnification")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        written = render(load_recipe(args.recipe))
    except (RecipeError, RenderError, FileNotFoundError) as exc:
        print(f"tripodfigs: {exc}", file=sys.stderr)
        return 2
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
