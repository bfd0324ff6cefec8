"""Plotting scripts for the tripod-lattice CSV outputs.

Thin, read-only renderers: all physics lives in the solver package;
these scripts consume its CSV files and emit SVG + PNG figures.
"""

__version__ = "0.1.0"

from .recipes import FigureRecipe, load_recipe  # noqa: F401
from .render import RenderError, render  # noqa: F401
