"""Figure recipes over the sweep CSV schema.

Each recipe reads one or more CSV files produced by the engine's sweep
command and rebuilds the corresponding multi-panel figure: flux and noise
against the hot-bath coherence and the envelope duration, the optimal
coherence against envelope duration, efficiency at maximum power against
Carnot efficiency with the eta_c/2 reference, and the TUR-ratio maps with
the unity bound.  Rendering is read-only over its inputs and reproducible:
no timestamps are embedded, so identical CSVs give identical image bytes.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

FIGURE_IDS = ("2", "3", "4", "5", "phmax")


class RecipeError(ValueError):
    """Missing columns, empty datasets or an unknown figure id."""


@dataclass
class FigureRecipe:
    figure_id: str
    inputs: list[Path]
    output: Path
    dpi: int = 150
    cmap: str = "viridis"
    labels: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.figure_id not in FIGURE_IDS:
            raise RecipeError(f"unknown figure id {self.figure_id!r}, "
                              f"expected one of {FIGURE_IDS}")
        if not self.inputs:
            raise RecipeError("at least one input CSV is required")


def read_table(path) -> dict[str, np.ndarray]:
    """CSV -> column arrays (floats where possible); error rows dropped."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        rows = [r for r in reader
                if not r.get("error")]
    if not rows:
        raise RecipeError(f"empty dataset: {path}")
    table = {}
    for name in rows[0]:
        values = [r[name] for r in rows]
        try:
            table[name] = np.array([float(v) for v in values])
        except ValueError:
            table[name] = np.array(values)
    return table


def require_columns(table, names, path="dataset"):
    missing = [n for n in names if n not in table]
    if missing:
        raise RecipeError(f"{path} is missing columns: {missing}")


def _series_by(table, key):
    """Sorted unique values of a grouping column."""
    return np.unique(table[key])


def _color_sequence(n, cmap):
    return [plt.get_cmap(cmap)(x) for x in np.linspace(0.1, 0.9, max(n, 2))]


def _panel_vs_axis(ax, table, x_key, y_key, group_key, cmap, xlabel, ylabel,
                   group_label):
    groups = _series_by(table, group_key)
    colors = _color_sequence(len(groups), cmap)
    for value, color in zip(groups, colors):
        sel = table[group_key] == value
        x = table[x_key][sel]
        order = np.argsort(x)
        ax.plot(x[order], table[y_key][sel][order], "-o", ms=2.5, lw=1.0,
                color=color, label=f"{group_label}={value:g}")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)


def _quadratic_argmax(x, y):
    k = int(np.argmax(y))
    if k in (0, len(y) - 1):
        return float(x[k]), True
    denom = y[k - 1] - 2 * y[k] + y[k + 1]
    if denom == 0:
        return float(x[k]), False
    return float(x[k] + 0.25 * (y[k - 1] - y[k + 1]) / denom * (x[k + 1] - x[k - 1])), False


def _fig_flux_or_noise(recipe, dyn_col, geo_col):
    """Four panels: dynamic/geometric quantity vs p_h (left) and t_e (right)."""
    table = read_table(recipe.inputs[0])
    require_columns(table, ("ph", "te_rel", dyn_col, geo_col), recipe.inputs[0])
    fig, axes = plt.subplots(2, 2, figsize=(9, 7))
    _panel_vs_axis(axes[0, 0], table, "ph", dyn_col, "te_rel", recipe.cmap,
                   r"$p_h$", dyn_col, r"$t_e/t_p$")
    _panel_vs_axis(axes[0, 1], table, "te_rel", dyn_col, "ph", recipe.cmap,
                   r"$t_e/t_p$", dyn_col, r"$p_h$")
    _panel_vs_axis(axes[1, 0], table, "ph", geo_col, "te_rel", recipe.cmap,
                   r"$p_h$", geo_col, r"$t_e/t_p$")
    _panel_vs_axis(axes[1, 1], table, "te_rel", geo_col, "ph", recipe.cmap,
                   r"$t_e/t_p$", geo_col, r"$p_h$")
    for ax, tag in zip(axes.flat, "abcd"):
        ax.set_title(f"({tag})", loc="left", fontsize=10)
    axes[0, 0].legend(fontsize=6, ncol=2)
    fig.suptitle("dynamic (top) and geometric (bottom) "
                 + ("flux" if dyn_col == "jd" else "noise"))
    return fig


def _fig_emp(recipe):
    """eta* against t_e (a) and against eta_c with the eta_c/2 line (b)."""
    table = read_table(recipe.inputs[0])
    require_columns(table, ("eta_c", "te_rel", "eta_star"), recipe.inputs[0])
    fig, (ax_a, ax_b) = plt.subplots(1, 2, figsize=(10, 4.2))
    _panel_vs_axis(ax_a, table, "te_rel", "eta_star", "eta_c", recipe.cmap,
                   r"$t_e/t_p$", r"$\eta^*$", r"$\eta_c$")
    _panel_vs_axis(ax_b, table, "eta_c", "eta_star", "te_rel", recipe.cmap,
                   r"$\eta_c$", r"$\eta^*$", r"$t_e/t_p$")
    xs = np.array([0.0, float(np.max(table["eta_c"])) * 1.05])
    ax_b.plot(xs, 0.5 * xs, "r-", lw=1.6, label=r"$\eta^* = \eta_c/2$",
              gid="reference-eta_c-over-2")
    ax_a.set_title("(a)", loc="left", fontsize=10)
    ax_b.set_title("(b)", loc="left", fontsize=10)
    ax_b.legend(fontsize=8)
    fig.suptitle("efficiency at maximum power")
    return fig


def _fig_tur(recipe):
    """gamma/eta maps per cavity temperature with the unity bound marked."""
    table = read_table(recipe.inputs[0])
    require_columns(table, ("tl", "te_rel", "tur_ratio"), recipe.inputs[0])
    tls = _series_by(table, "tl")
    fig, axes = plt.subplots(1, len(tls), figsize=(4.2 * len(tls), 3.8),
                             squeeze=False)
    group = "ph" if "ph" in table else "te_rel"
    for ax, tl in zip(axes[0], tls):
        sel = table["tl"] == tl
        sub = {k: v[sel] for k, v in table.items()}
        _panel_vs_axis(ax, sub, "te_rel", "tur_ratio", group, recipe.cmap,
                       r"$t_e/t_p$", r"$\gamma/\eta$", group)
        ax.axhline(1.0, color="k", ls="--", lw=1.2, gid="reference-unity")
        below = sub["tur_ratio"] < 1.0
        if np.any(below):
            ax.plot(sub["te_rel"][below], sub["tur_ratio"][below], "rx",
                    ms=6, label="bound violated")
            ax.legend(fontsize=7)
        ax.set_title(f"$t_l$ = {tl:g}", fontsize=10)
    fig.suptitle("uncertainty bound ratio")
    return fig


def _fig_phmax(recipe):
    """Optimal coherence p_h* against envelope duration, one curve per input."""
    fig, (ax_j, ax_n) = plt.subplots(1, 2, figsize=(10, 4.2))
    labels = recipe.labels or [Path(p).stem for p in recipe.inputs]
    colors = _color_sequence(len(recipe.inputs), recipe.cmap)
    for path, label, color in zip(recipe.inputs, labels, colors):
        table = read_table(path)
        require_columns(table, ("ph", "te_rel", "j", "n"), path)
        for ax, col in ((ax_j, "j"), (ax_n, "n")):
            stars = []
            for te in _series_by(table, "te_rel"):
                sel = table["te_rel"] == te
                order = np.argsort(table["ph"][sel])
                star, _ = _quadratic_argmax(table["ph"][sel][order],
                                            table[col][sel][order])
                stars.append((te, star))
            stars = np.array(stars)
            ax.plot(stars[:, 0], stars[:, 1], "-o", ms=4, color=color,
                    label=label)
    for ax, tag, ylab in ((ax_j, "(a) flux", r"$p_h^*$ of $j$"),
                          (ax_n, "(b) noise", r"$p_h^*$ of $n$")):
        ax.set_xlabel(r"$t_e/t_p$")
        ax.set_ylabel(ylab)
        ax.set_title(tag, loc="left", fontsize=10)
        ax.set_ylim(-0.05, 1.05)
        ax.legend(fontsize=7)
    fig.suptitle("optimal hot-bath coherence")
    return fig


def build_figure(recipe: FigureRecipe):
    """The matplotlib Figure for a recipe (not yet written to disk)."""
    if recipe.figure_id == "2":
        return _fig_flux_or_noise(recipe, "jd", "jg")
    if recipe.figure_id == "3":
        return _fig_flux_or_noise(recipe, "nd", "ng")
    if recipe.figure_id == "4":
        return _fig_emp(recipe)
    if recipe.figure_id == "5":
        return _fig_tur(recipe)
    return _fig_phmax(recipe)


def render(recipe: FigureRecipe) -> Path:
    """Render a recipe to its output path; returns the path written."""
    fig = build_figure(recipe)
    recipe.output.parent.mkdir(parents=True, exist_ok=True)
    if recipe.output.suffix == ".svg":
        metadata = {"Date": None}  # keep re-renders byte-identical
    else:
        metadata = {"Software": "amqhe-figures"}
    fig.savefig(recipe.output, dpi=recipe.dpi, metadata=metadata)
    plt.close(fig)
    return recipe.output
