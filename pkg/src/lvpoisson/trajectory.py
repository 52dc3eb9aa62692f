"""Time-indexed state sequences with per-step conservation diagnostics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FormatError


@dataclass(frozen=True)
class Trajectory:
    """Uniformly spaced discrete trajectory.

    ``diagnostics`` maps column name to a per-row array; insertion order is
    the on-disk column order (H, Casimirs, declared integrals, solver stats).
    """

    times: np.ndarray
    states: np.ndarray
    diagnostics: dict[str, np.ndarray]

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        s = np.asarray(self.states, dtype=float)
        if t.ndim != 1 or s.ndim != 2 or s.shape[0] != t.shape[0]:
            raise FormatError(
                f"times/states shape mismatch: {t.shape} vs {s.shape}"
            )
        if t.shape[0] >= 2:
            dt = np.diff(t)
            if np.any(dt <= 0):
                raise FormatError("times must be strictly increasing")
            if np.max(np.abs(dt - dt[0])) > 1e-9 * max(1.0, abs(dt[0])):
                raise FormatError("times must be uniformly spaced")
        for name, col in self.diagnostics.items():
            if np.asarray(col).shape != t.shape:
                raise FormatError(f"diagnostic column {name!r} has wrong length")
        t.setflags(write=False)
        s.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "states", s)

    def __len__(self) -> int:
        return self.times.shape[0]

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    @property
    def h(self) -> float:
        """Step size (0 for a single-row trajectory)."""
        return float(self.times[1] - self.times[0]) if len(self) > 1 else 0.0

    def column_names(self) -> list[str]:
        n = self.dim
        return ["t"] + [f"x{i + 1}" for i in range(n)] + list(self.diagnostics)

    def column(self, name: str) -> np.ndarray:
        if name == "t":
            return self.times
        if name.startswith("x"):
            try:
                i = int(name[1:])
            except ValueError:
                i = 0
            if 1 <= i <= self.dim:
                return self.states[:, i - 1]
        if name in self.diagnostics:
            return np.asarray(self.diagnostics[name])
        raise FormatError(f"no column named {name!r}")
