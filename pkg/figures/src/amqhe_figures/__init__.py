"""Paper-style figure regeneration from amqhe sweep CSV files."""

__version__ = "0.1.0"

from .recipes import FIGURE_IDS, FigureRecipe, RecipeError, build_figure, render

__all__ = ["FIGURE_IDS", "FigureRecipe", "RecipeError", "build_figure", "render"]
