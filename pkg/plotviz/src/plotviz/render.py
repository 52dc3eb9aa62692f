"""Deterministic SVG rendering of experiment artifacts."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .recipes import BUILTIN_RECIPES, FigureRecipe, PanelSpec  # noqa: E402


class PlotvizError(Exception):
    pass


class MissingArtifact(PlotvizError):
    pass


class MissingColumn(PlotvizError):
    pass


class UnknownRecipe(PlotvizError):
    pass


# fixed fonts/salt keep repeated SVG output byte-identical
_RC = {
    "svg.hashsalt": "plotviz",
    "font.family": "DejaVu Sans",
    "font.size": 9.0,
    "figure.dpi": 100,
    "axes.grid": True,
    "grid.alpha": 0.3,
}


def load_table(path: str) -> dict[str, np.ndarray]:
    """Read a trajectory CSV into named columns."""
    if not os.path.exists(path):
        raise MissingArtifact(f"artifact not found: {path}")
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if len(lines) < 2:
        raise MissingArtifact(f"artifact has no data rows: {path}")
    names = lines[0].split(",")
    data = np.array([[float(c) for c in ln.split(",")] for ln in lines[1:]])
    return {name: data[:, j] for j, name in enumerate(names)}


def _columns(table: dict[str, np.ndarray], names, path: str) -> list[np.ndarray]:
    cols = []
    for name in names:
        if name not in table:
            raise MissingColumn(f"{path} has no column {name!r}")
        cols.append(table[name])
    return cols


def _render_panel(ax, panel: PanelSpec, in_dir: str) -> None:
    for fname in panel.inputs:
        path = os.path.join(in_dir, fname)
        table = load_table(path)
        cols = _columns(table, panel.columns, path)
        if panel.tail is not None:
            cols = [c[-panel.tail :] for c in cols]
        label = fname.removesuffix(".csv")

        if panel.kind == "time-series":
            t = table["t"] if "t" in table else np.arange(len(cols[0]))
            if panel.tail is not None:
                t = t[-panel.tail :]
            for name, col in zip(panel.columns, cols):
                ax.plot(t, col, lw=0.8, label=name)
            ax.set_xlabel("t")
        elif panel.kind == "discrepancy":
            (col,) = cols
            dev = col / col[0] - 1.0 if panel.relative else col - col[0]
            dev = np.abs(dev) if panel.log_scale else dev
            k = np.arange(len(dev))
            if panel.log_scale:
                ax.semilogy(k, np.maximum(dev, 1e-18), lw=0.8, label=panel.columns[0])
            else:
                ax.plot(k, dev, lw=0.8, label=panel.columns[0])
            ax.set_xlabel("step")
        elif panel.kind == "3d-scatter-lines":
            ax.plot(*cols, lw=0.6, label=label)
            ax.set_xlabel(panel.columns[0])
            ax.set_ylabel(panel.columns[1])
            ax.set_zlabel(panel.columns[2])
        elif panel.kind == "phase-plane":
            ax.plot(cols[0], cols[1], lw=0.6, marker=".", ms=1.5, label=label)
            ax.set_xlabel(panel.columns[0])
            ax.set_ylabel(panel.columns[1])
        else:
            raise PlotvizError(f"unknown panel kind {panel.kind!r}")

    if panel.bound is not None:
        ax.axhline(panel.bound, color="crimson", ls="--", lw=0.9,
                   label=f"{panel.bound:g} bound")
    if panel.title:
        ax.set_title(panel.title)
    if panel.kind != "3d-scatter-lines":
        ax.legend(loc="best", fontsize=7)
    else:
        ax.legend(loc="upper left", fontsize=7)


def resolve_recipe(name: str) -> FigureRecipe:
    if name not in BUILTIN_RECIPES:
        raise UnknownRecipe(
            f"unknown recipe {name!r}; bundled: {sorted(BUILTIN_RECIPES)}"
        )
    return BUILTIN_RECIPES[name]


def render(recipe: FigureRecipe | str, in_dir: str, out_path: str | None = None) -> str:
    """Render a recipe from an artifact directory; returns the image path.

    Inputs are opened read-only; repeated rendering of the same artifacts is
    byte-identical (vector output, fixed fonts and hash salt).
    """
    if isinstance(recipe, str):
        recipe = resolve_recipe(recipe)
    out = out_path or recipe.default_output
    rows, cols = recipe.layout
    with plt.rc_context(_RC):
        fig = plt.figure(figsize=recipe.figsize)
        for idx, panel in enumerate(recipe.panels, start=1):
            if panel.projection_3d:
                ax = fig.add_subplot(rows, cols, idx, projection="3d")
            else:
                ax = fig.add_subplot(rows, cols, idx)
            _render_panel(ax, panel, in_dir)
        fig.suptitle(recipe.name)
        fig.tight_layout()
        fig.savefig(out, format=os.path.splitext(out)[1].lstrip(".") or "svg",
                    metadata={"Date": None})
        plt.close(fig)
    return out
