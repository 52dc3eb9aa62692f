"""Bundled figure recipes, one per experiment artifact set."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class PanelSpec:
    """One subplot: a plot kind, its source files and column selection.

    kinds: ``time-series`` (columns vs t), ``discrepancy`` (deviation of one
    column from its first value), ``3d-scatter-lines`` (three columns as a
    space curve per input file), ``phase-plane`` (two columns against each
    other per input file).
    """

    kind: str
    inputs: tuple[str, ...]
    columns: tuple[str, ...]
    title: str = ""
    relative: bool = False
    log_scale: bool = False
    bound: float | None = None
    projection_3d: bool = False
    tail: int | None = None


@dataclass(frozen=True)
class FigureRecipe:
    name: str
    panels: tuple[PanelSpec, ...]
    layout: tuple[int, int]
    figsize: tuple[float, float] = (11.0, 4.0)
    default_output: str = field(default="")

    def __post_init__(self):
        if not self.default_output:
            object.__setattr__(self, "default_output", f"{self.name}.svg")

    @property
    def inputs(self) -> tuple[str, ...]:
        seen: list[str] = []
        for panel in self.panels:
            for name in panel.inputs:
                if name not in seen:
                    seen.append(name)
        return tuple(seen)


def _delta_portrait(name: str, plane_inputs: tuple[str, ...], zoom: bool = False):
    inputs = tuple(f"{name}_i{i}.csv" for i in (1, 2, 3))
    panels = [
        PanelSpec(
            kind="3d-scatter-lines",
            inputs=inputs,
            columns=("x1", "x2", "x3"),
            title="coordinates (x1, x2, x3)",
            projection_3d=True,
        ),
        PanelSpec(
            kind="phase-plane",
            inputs=plane_inputs,
            columns=("x4", "x5"),
            title="coordinates (x4, x5)",
        ),
    ]
    if zoom:
        panels.append(
            PanelSpec(
                kind="phase-plane",
                inputs=plane_inputs,
                columns=("x4", "x5"),
                title="zoom: quasi-periodic band",
                tail=100,
            )
        )
    cols = len(panels)
    return FigureRecipe(
        name=name,
        panels=tuple(panels),
        layout=(1, cols),
        figsize=(5.5 * cols, 4.5),
    )


def _se_recipe(name: str) -> FigureRecipe:
    return FigureRecipe(
        name=name,
        panels=(
            PanelSpec(
                kind="time-series",
                inputs=(f"{name}.csv",),
                columns=("x1",),
                title="coordinate u",
            ),
            PanelSpec(
                kind="time-series",
                inputs=(f"{name}.csv",),
                columns=("x2",),
                title="coordinate v",
            ),
        ),
        layout=(1, 2),
        figsize=(11.0, 4.0),
    )


BUILTIN_RECIPES: dict[str, FigureRecipe] = {
    r.name: r
    for r in (
        FigureRecipe(
            name="fig1-integrable",
            panels=(
                PanelSpec(
                    kind="time-series",
                    inputs=("fig1-integrable.csv",),
                    columns=("x1", "x2", "x3"),
                    title="first three coordinates",
                ),
                PanelSpec(
                    kind="discrepancy",
                    inputs=("fig1-integrable.csv",),
                    columns=("C1",),
                    title="Casimir discrepancy",
                    relative=True,
                    log_scale=True,
                    bound=1e-9,
                ),
                PanelSpec(
                    kind="discrepancy",
                    inputs=("fig1-integrable.csv",),
                    columns=("H",),
                    title="Hamiltonian discrepancy",
                ),
            ),
            layout=(1, 3),
            figsize=(16.0, 4.5),
        ),
        _se_recipe("fig3-se-below"),
        _se_recipe("fig3-se-above"),
        _delta_portrait(
            "fig4-6-pi1",
            plane_inputs=tuple(f"fig4-6-pi1_i{i}.csv" for i in (1, 2, 3)),
            zoom=True,
        ),
        _delta_portrait("fig7-pi2", plane_inputs=("fig7-pi2_i2.csv",)),
        _delta_portrait(
            "fig8-tilde-pi1",
            plane_inputs=tuple(f"fig8-tilde-pi1_i{i}.csv" for i in (1, 2, 3)),
        ),
    )
}
