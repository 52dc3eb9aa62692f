"""Trajectory CSV persistence.

Layout: header ``t,x1..xN,<diagnostics...>``, one row per step including
row 0.  Floats are printed with 17 significant digits so the round trip is
bit exact for IEEE doubles.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import FormatError, IoError
from .trajectory import Trajectory

_INT_COLUMNS = {"stage_iters"}


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_trajectory(traj: Trajectory, path) -> None:
    """Serialize; rejects non-finite values before touching the file."""
    names = traj.column_names()
    cols = [traj.column(n) for n in names]
    for name, col in zip(names, cols):
        if not np.all(np.isfinite(np.asarray(col, dtype=float))):
            raise FormatError(f"column {name!r} contains non-finite values")
    lines = [",".join(names)]
    for i in range(len(traj)):
        cells = []
        for name, col in zip(names, cols):
            if name in _INT_COLUMNS:
                cells.append(str(int(col[i])))
            else:
                cells.append(_fmt(float(col[i])))
        lines.append(",".join(cells))
    try:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def read_trajectory(path) -> Trajectory:
    """Inverse of :func:`write_trajectory`; validates the header layout."""
    try:
        with open(path, "r", encoding="ascii") as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    if not lines:
        raise FormatError(f"{path}: empty trajectory file")
    names = lines[0].split(",")
    if names[0] != "t":
        raise FormatError(f"{path}: header must start with 't', got {names[0]!r}")
    dim = 0
    for name in names[1:]:
        if name == f"x{dim + 1}":
            dim += 1
        else:
            break
    if dim == 0:
        raise FormatError(f"{path}: no state columns x1.. in header")
    diag_names = names[1 + dim :]

    rows = []
    for ln in lines[1:]:
        cells = ln.split(",")
        if len(cells) != len(names):
            raise FormatError(
                f"{path}: row has {len(cells)} cells, header has {len(names)}"
            )
        rows.append([float(c) for c in cells])
    data = np.array(rows, dtype=float)
    if data.size == 0:
        raise FormatError(f"{path}: no data rows")

    diagnostics: dict[str, np.ndarray] = {}
    for j, name in enumerate(diag_names):
        col = data[:, 1 + dim + j]
        diagnostics[name] = col.astype(int) if name in _INT_COLUMNS else col
    return Trajectory(
        times=data[:, 0],
        states=data[:, 1 : 1 + dim],
        diagnostics=diagnostics,
    )


def ensure_dir(path) -> str:
    os.makedirs(path, exist_ok=True)
    return str(path)
