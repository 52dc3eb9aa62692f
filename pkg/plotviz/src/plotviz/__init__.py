"""Figure rendering for lvpoisson experiment artifacts."""

__version__ = "0.1.0"

from .recipes import BUILTIN_RECIPES, FigureRecipe, PanelSpec
from .render import (
    MissingArtifact,
    MissingColumn,
    PlotvizError,
    UnknownRecipe,
    load_table,
    render,
    resolve_recipe,
)
