"""Figure recipes: which CSVs to read and how to style them.

A recipe JSON holds:
    figure         one of the known figure ids (fig1a ... fig10)
    inputs         mapping role -> CSV path ("bands", "tb", "potentials",
                   "wannier"; which roles are required depends on the id)
    magnification  linewidth magnification factor (optional; defaults to
                   the per-figure value below)
    out            output image path; ".svg" and ".png" are both written
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

# default linewidth magnification per figure family
DEFAULT_MAGNIFICATION = {
    "fig1a": 40.0, "fig1b": 40.0,
    "fig1c": 8.0, "fig1d": 8.0,
    "fig5a": 5.0, "fig5b": 5.0, "fig5c": 5.0, "fig5d": 5.0,
}

# figure id -> (kind, required input roles)
FIGURES = {
    "fig1a": ("bands", ("bands",)),
    "fig1b": ("bands", ("bands",)),
    "fig1c": ("band1", ("bands",)),
    "fig1d": ("band1", ("bands",)),
    "fig2": ("bands_compare", ("bands", "bands_dark")),
    "fig3": ("potentials", ("potentials",)),
    "fig4": ("wannier", ("wannier",)),
    "fig5a": ("bands", ("bands",)),
    "fig5b": ("bands", ("bands",)),
    "fig5c": ("bands", ("bands",)),
    "fig5d": ("bands", ("bands",)),
    "fig6a": ("tb_sweep", ("tb",)),
    "fig6b": ("tb_sweep", ("tb",)),
    "fig7": ("tb_sweep", ("tb",)),
    "fig8": ("wannier", ("wannier",)),
    "fig9": ("wannier", ("wannier",)),
    "fig10": ("wannier", ("wannier",)),
}


class RecipeError(ValueError):
    """Raised for malformed or incomplete recipes."""


@dataclass(frozen=True)
class FigureRecipe:
    figure: str
    inputs: dict
    out: str
    magnification: float | None = None
    options: dict = field(default_factory=dict)

    @property
    def kind(self) -> str:
        return FIGURES[self.figure][0]

    def resolved_magnification(self) -> float:
        if self.magnification is not None:
            return float(self.magnification)
        return DEFAULT_MAGNIFICATION.get(self.figure, 1.0)


def make_recipe(raw: dict) -> FigureRecipe:
    for key in ("figure", "inputs", "out"):
        if key not in raw:
            raise RecipeError(f"recipe is missing {key!r}")
    figure = raw["figure"]
    if figure not in FIGURES:
        raise RecipeError(f"unknown figure id {figure!r}; "
                          f"known: {sorted(FIGURES)}")
    _, required = FIGURES[figure]
    missing = [role for role in required if role not in raw["inputs"]]
    if missing:
        raise RecipeError(f"{figure} needs inputs {missing}")
    known = {"figure", "inputs", "out", "magnification", "options"}
    unknown = set(raw) - known
    if unknown:
        raise RecipeError(f"unknown recipe keys: {sorted(unknown)}")
    return FigureRecipe(figure=figure, inputs=dict(raw["inputs"]),
                        out=raw["out"],
                        magnification=raw.get("magnification"),
                        options=dict(raw.get("options", {})))


def load_recipe(path) -> FigureRecipe:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise RecipeError(f"malformed recipe {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise RecipeError("recipe must be a JSON object")
    return make_recipe(raw)
