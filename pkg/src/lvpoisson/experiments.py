"""Canned experiment definitions reproducing the reference numerical studies.

Each spec names a system from the config, an integrator, a start-point
recipe, and a step budget.  Running a spec writes one CSV per trajectory
plus a manifest; verifying re-reads the artifacts from disk, recomputes the
conservation diagnostics from the raw states (so tampered columns are
caught), and evaluates the per-spec acceptance rules into a verdict file.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field

import numpy as np

from .analysis import drift_report, se_modified_hamiltonian
from .config import CanonicalSystem, ConfigDocument, bundled_config
from .errors import MissingArtifact, NotFound, ValidationError
from .integrators import HPStepConfig, se_simulate, simulate
from .io import ensure_dir, read_trajectory, write_trajectory
from .systems import LVSystem, require_state
from .trajectory import Trajectory

SE_NORM_BOUND = 1e6


@dataclass(frozen=True)
class SeedRecipe:
    """Start points q + f * eta * (u + v), one trajectory per fraction f."""

    eta: float
    u: tuple[float, ...]
    v: tuple[float, ...]
    fractions: tuple[float, ...]

    def points(self, q: np.ndarray) -> list[np.ndarray]:
        u = np.asarray(self.u, dtype=float)
        v = np.asarray(self.v, dtype=float)
        return [q + f * self.eta * (u + v) for f in self.fractions]


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    system: str
    integrator: str
    h: float
    n_steps: int
    x0: tuple[float, ...] | None = None
    seed: SeedRecipe | None = None
    extended_n: int | None = None
    description: str = ""


_THIRDS = (1.0 / 3.0, 2.0 / 3.0, 1.0)

BUILTIN_SPECS: dict[str, ExperimentSpec] = {
    spec.name: spec
    for spec in (
        ExperimentSpec(
            name="fig1-integrable",
            system="integrable-5d",
            integrator="hp1",
            h=1.0,
            n_steps=100,
            x0=(2.0, 2.0, 2.0, 2.0, 2.0),
            description="integrable 5-species run with a deliberately large step",
        ),
        ExperimentSpec(
            name="fig3-se-below",
            system="harmonic-oscillator",
            integrator="symplectic_euler",
            h=2.0 - 1e-3,
            n_steps=100,
            x0=(1.0, 0.0),
            extended_n=10_000,
            description="symplectic Euler just inside the elliptic window",
        ),
        ExperimentSpec(
            name="fig3-se-above",
            system="harmonic-oscillator",
            integrator="symplectic_euler",
            h=2.0 + 1e-3,
            n_steps=100,
            x0=(1.0, 0.0),
            extended_n=10_000,
            description="symplectic Euler just outside the elliptic window",
        ),
        ExperimentSpec(
            name="fig4-6-pi1",
            system="delta-system",
            integrator="hp1",
            h=1e-2,
            n_steps=500,
            seed=SeedRecipe(eta=1.0, u=(0, 0, 0, 1, 0), v=(0, 0, 0, 0, 1), fractions=_THIRDS),
            description="dynamics near the planar-pair orbit family",
        ),
        ExperimentSpec(
            name="fig7-pi2",
            system="delta-system",
            integrator="hp1",
            h=1e-2,
            n_steps=100,
            seed=SeedRecipe(eta=1.0, u=(1, 1, 2, 0, 0), v=(1, -1, 0, 0, 0), fractions=_THIRDS),
            description="dynamics near the triple-block orbit family",
        ),
        ExperimentSpec(
            name="fig8-tilde-pi1",
            system="delta-system",
            integrator="hp1",
            h=1e-2,
            n_steps=100,
            seed=SeedRecipe(
                eta=1e-1, u=(1, -2, -1, 0, 0), v=(1, 0, 1, 1, 0), fractions=_THIRDS
            ),
            description="dynamics seeded on a fast-pair tangent plane",
        ),
    )
}


def list_experiments(config: ConfigDocument | None = None) -> list[str]:
    names = set(BUILTIN_SPECS)
    if config is not None:
        names.update(config.experiments)
    return sorted(names)


def _config_spec(name: str, doc: dict) -> ExperimentSpec:
    seed = None
    if "seed" in doc:
        s = doc["seed"]
        seed = SeedRecipe(
            eta=float(s["eta"]),
            u=tuple(float(c) for c in s["u"]),
            v=tuple(float(c) for c in s["v"]),
            fractions=tuple(float(f) for f in s.get("fractions", _THIRDS)),
        )
    return ExperimentSpec(
        name=name,
        system=str(doc["system"]),
        integrator=str(doc.get("integrator", "hp1")),
        h=float(doc["h"]),
        n_steps=int(doc["n_steps"]),
        x0=tuple(float(c) for c in doc["x0"]) if "x0" in doc else None,
        seed=seed,
        extended_n=int(doc["extended_n"]) if "extended_n" in doc else None,
        description=str(doc.get("description", "")),
    )


def resolve_spec(name: str, config: ConfigDocument | None = None) -> ExperimentSpec:
    if config is not None and name in config.experiments:
        return _config_spec(name, config.experiments[name])
    if name in BUILTIN_SPECS:
        return BUILTIN_SPECS[name]
    raise NotFound(
        f"unknown experiment {name!r}; known: {list_experiments(config)}"
    )


def _spec_runs(spec: ExperimentSpec, config: ConfigDocument):
    """Yield (artifact_stem, trajectory-producer) pairs for a spec."""
    system = config.system(spec.system)
    runs: list[tuple[str, object, np.ndarray, int]] = []
    if isinstance(system, CanonicalSystem):
        if spec.integrator != "symplectic_euler":
            raise ValidationError(
                f"experiment {spec.name!r}: canonical systems run with symplectic_euler"
            )
        x0 = np.asarray(spec.x0, dtype=float)
        runs.append((spec.name, system, x0, spec.n_steps))
        if spec.extended_n:
            runs.append((f"{spec.name}_extended", system, x0, spec.extended_n))
        return runs
    if not isinstance(system, LVSystem):  # pragma: no cover
        raise ValidationError(f"experiment {spec.name!r}: unsupported system type")
    if spec.seed is not None:
        for i, x0 in enumerate(spec.seed.points(system.q), start=1):
            runs.append((f"{spec.name}_i{i}", system, require_state(x0), spec.n_steps))
    elif spec.x0 is not None:
        runs.append((spec.name, system, require_state(np.asarray(spec.x0)), spec.n_steps))
    else:
        raise ValidationError(f"experiment {spec.name!r}: no start point recipe")
    return runs


def run_experiment(
    name: str,
    config: ConfigDocument | None = None,
    out_dir: str = ".",
    solver_tol: float | None = None,
) -> dict[str, str]:
    """Execute a spec and write its artifact set; returns name -> path."""
    config = config if config is not None else bundled_config()
    spec = resolve_spec(name, config)
    tol = solver_tol if solver_tol is not None else config.tolerances.solver_tol
    target = ensure_dir(os.path.join(out_dir, spec.name))
    artifacts: dict[str, str] = {}
    t_start = time.perf_counter()
    for stem, system, x0, n in _spec_runs(spec, config):
        if isinstance(system, CanonicalSystem):
            # escape runs are cut right after leaving |x|^2 <= 1e9 so the
            # artifact stays finite; bounded runs are unaffected
            traj = se_simulate(x0[0], x0[1], spec.h, n, stop_norm2=1e9)
        else:
            cfg = HPStepConfig(h=spec.h, solver_tol=tol)
            traj = simulate(system, spec.integrator, x0, spec.h, n, cfg=cfg)
        path = os.path.join(target, f"{stem}.csv")
        write_trajectory(traj, path)
        artifacts[f"{stem}.csv"] = path
    manifest = {
        "experiment": spec.name,
        "system": spec.system,
        "integrator": spec.integrator,
        "h": spec.h,
        "n_steps": spec.n_steps,
        "extended_n": spec.extended_n,
        "solver_tol": tol,
        "files": sorted(artifacts),
        "wall_time_s": round(time.perf_counter() - t_start, 3),
    }
    man_path = os.path.join(target, "manifest.json")
    with open(man_path, "w", encoding="ascii") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    artifacts["manifest.json"] = man_path
    return artifacts


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str

    def __post_init__(self):
        object.__setattr__(self, "passed", bool(self.passed))


@dataclass(frozen=True)
class Verdict:
    experiment: str
    passed: bool
    checks: tuple[Check, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "passed": self.passed,
            "checks": [
                {"name": c.name, "passed": c.passed, "detail": c.detail}
                for c in self.checks
            ],
        }


def _load_artifact(out_dir: str, spec_name: str, fname: str) -> Trajectory:
    path = os.path.join(out_dir, spec_name, fname)
    if not os.path.exists(path):
        raise MissingArtifact(f"expected artifact {path} not found")
    return read_trajectory(path)


def _integrity_checks(
    traj: Trajectory, system, expected_rows: int | None, stem: str
) -> list[Check]:
    """expected_rows=None accepts any length >= 2 (truncated escape runs)."""
    checks = []
    if len(traj) < 2:
        return [Check(f"{stem}:rows", False, "insufficient data")]
    if expected_rows is None:
        checks.append(Check(f"{stem}:rows", True, f"{len(traj)} rows"))
    else:
        checks.append(
            Check(
                f"{stem}:rows",
                len(traj) == expected_rows,
                f"{len(traj)} rows, expected {expected_rows}",
            )
        )
    if isinstance(system, CanonicalSystem):
        H = 0.5 * (traj.states[:, 0] ** 2 + traj.states[:, 1] ** 2)
        dev = np.max(np.abs(H - traj.diagnostics["H"]))
        checks.append(
            Check(f"{stem}:H-column", dev <= 1e-9 * max(1.0, np.max(np.abs(H))),
                  f"recomputed-H mismatch {dev:.2e}")
        )
        return checks
    from .integrators import _diagnostic_evaluators

    names, row = _diagnostic_evaluators(system)
    recomputed = np.array([row(x) for x in traj.states])
    for j, name in enumerate(names):
        stored = traj.diagnostics.get(name)
        if stored is None:
            checks.append(Check(f"{stem}:{name}-column", False, "column missing"))
            continue
        scale = max(1.0, float(np.max(np.abs(recomputed[:, j]))))
        dev = float(np.max(np.abs(recomputed[:, j] - stored))) / scale
        checks.append(
            Check(
                f"{stem}:{name}-column",
                dev <= 1e-9,
                f"recomputed {name} mismatch {dev:.2e} (relative)",
            )
        )
    return checks


def _casimir_checks(traj: Trajectory, report_tol: float, stem: str) -> list[Check]:
    checks = []
    for name, col in traj.diagnostics.items():
        if not name.startswith("C"):
            continue
        col = np.asarray(col, dtype=float)
        rel = float(np.max(np.abs(col / col[0] - 1.0)))
        checks.append(
            Check(
                f"{stem}:{name}-conservation",
                rel <= report_tol,
                f"max relative deviation {rel:.3e} (bound {report_tol:.0e})",
            )
        )
    return checks


def verify_experiment(
    name: str,
    config: ConfigDocument | None = None,
    out_dir: str = ".",
) -> Verdict:
    """Evaluate the pass/fail rules for a spec's artifacts on disk."""
    config = config if config is not None else bundled_config()
    spec = resolve_spec(name, config)
    system = config.system(spec.system)
    report_tol = config.tolerances.report_tol
    checks: list[Check] = []

    def finish() -> Verdict:
        verdict = Verdict(
            experiment=spec.name,
            passed=all(c.passed for c in checks),
            checks=tuple(checks),
        )
        path = os.path.join(out_dir, spec.name, "verdict.json")
        with open(path, "w", encoding="ascii") as fh:
            json.dump(verdict.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        return verdict

    if isinstance(system, CanonicalSystem):
        main = _load_artifact(out_dir, spec.name, f"{spec.name}.csv")
        checks.extend(_integrity_checks(main, system, spec.n_steps + 1, "main"))
        ext = _load_artifact(out_dir, spec.name, f"{spec.name}_extended.csv")
        expected_ext = None if spec.h > 2.0 else (spec.extended_n or 0) + 1
        checks.extend(_integrity_checks(ext, system, expected_ext, "extended"))
        if len(ext) >= 2:
            norm2 = ext.states[:, 0] ** 2 + ext.states[:, 1] ** 2
            sup = float(np.max(norm2))
            elliptic = se_modified_hamiltonian(spec.h).elliptic
            if spec.h < 2.0:
                checks.append(
                    Check("bounded-orbit", sup <= SE_NORM_BOUND,
                          f"sup |x|^2 = {sup:.3e} (bound {SE_NORM_BOUND:.0e})")
                )
                checks.append(Check("elliptic-flag", elliptic, f"elliptic={elliptic}"))
            else:
                checks.append(
                    Check("escape", sup >= SE_NORM_BOUND,
                          f"sup |x|^2 = {sup:.3e} (must exceed {SE_NORM_BOUND:.0e})")
                )
                checks.append(Check("elliptic-flag", not elliptic, f"elliptic={elliptic}"))
        return finish()

    stems = [s for s, *_ in _spec_runs(spec, config)]
    for stem in stems:
        traj = _load_artifact(out_dir, spec.name, f"{stem}.csv")
        expected = spec.n_steps + 1
        checks.extend(_integrity_checks(traj, system, expected, stem))
        if len(traj) < 2:
            continue
        checks.extend(_casimir_checks(traj, report_tol, stem))
        drift = drift_report(traj)
        stats = drift["H"]
        checks.append(
            Check(
                f"{stem}:H-bounded",
                np.isfinite(stats.max_abs_dev),
                f"max |H - H0| = {stats.max_abs_dev:.3e}",
            )
        )
        if spec.name == "fig1-integrable":
            ok = abs(stats.slope) <= 3.0 * stats.slope_sigma
            checks.append(
                Check(
                    f"{stem}:H-slope",
                    ok,
                    f"slope {stats.slope:.3e} vs 3 sigma {3 * stats.slope_sigma:.3e}",
                )
            )
    return finish()
