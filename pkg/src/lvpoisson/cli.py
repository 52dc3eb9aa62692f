"""Command-line interface.

Subcommands: ``simulate``, ``spectrum``, ``orbit``, ``experiment``.
Exit codes: 0 on success/pass, 1 on a failed verification, 2 on error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .analysis import delta_spectral_matrix, linearize, spectrum
from .config import CanonicalSystem, ConfigDocument, bundled_config, load_config
from .errors import LVPoissonError
from .experiments import list_experiments, run_experiment, verify_experiment
from .integrators import HPStepConfig, simulate
from .io import ensure_dir, write_trajectory
from .orbits import continue_in_delta, shoot_orbit
from .systems import delta_system


def _parse_vector(text: str) -> np.ndarray:
    try:
        return np.array([float(c) for c in text.split(",")], dtype=float)
    except ValueError as exc:
        raise LVPoissonError(f"cannot parse vector {text!r}: {exc}") from exc


def _load(args) -> ConfigDocument:
    if args.config:
        return load_config(args.config)
    return bundled_config()


def _write_json(payload: dict, path: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if path:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(text + "\n")
        print(f"wrote {path}")
    else:
        print(text)


def _cmd_simulate(args) -> int:
    config = _load(args)
    system = config.system(args.system)
    if isinstance(system, CanonicalSystem):
        raise LVPoissonError(
            "simulate drives LV systems; canonical runs are covered by the "
            "fig3 experiments"
        )
    x0 = _parse_vector(args.x0)
    tol = args.tol if args.tol else config.tolerances.solver_tol
    cfg = HPStepConfig(h=args.h, solver_tol=tol)
    traj = simulate(system, args.integrator, x0, args.h, args.steps, cfg=cfg)
    out = args.output or os.path.join(
        ensure_dir(args.out), f"{args.system}-{args.integrator}.csv"
    )
    write_trajectory(traj, out)
    print(f"wrote {out} ({len(traj)} rows)")
    return 0


def _cmd_spectrum(args) -> int:
    config = _load(args)
    if args.delta is not None:
        M = delta_spectral_matrix(args.delta)
        label = f"delta-family (delta={args.delta:g})"
    else:
        system = config.system(args.system)
        if isinstance(system, CanonicalSystem):
            M = system.linearization()
        else:
            point = _parse_vector(args.point) if args.point else system.q
            M = linearize(system, point)
        label = args.system
    report = spectrum(M, resonance_max_coeff=args.max_coeff)
    payload = {
        "system": label,
        "matrix": report.matrix.tolist(),
        "eigenvalues": [
            {"re": float(w.real), "im": float(w.imag)} for w in report.eigenvalues
        ],
        "zero_count": report.zero_count,
        "elliptic": report.elliptic,
        "resonance": {
            "bound": report.resonance_bound,
            "relation": None if report.resonance is None else report.resonance.tolist(),
        },
    }
    _write_json(payload, args.output)
    return 0


def _orbit_payload(orb) -> dict:
    return {
        "anchor": orb.anchor.tolist(),
        "period": orb.period,
        "delta": orb.delta,
        "residual": orb.residual,
        "energy": orb.energy,
    }


def _cmd_orbit(args) -> int:
    config = _load(args)
    seed = _parse_vector(args.seed)
    if args.delta_family:
        deltas = np.arange(
            args.delta_from,
            args.delta_to + 0.5 * args.delta_step,
            args.delta_step,
        )
        sys0 = delta_system(deltas[0])
        orbit0 = shoot_orbit(sys0, seed, args.period, delta=deltas[0])
        family = continue_in_delta(delta_system, orbit0, deltas)
        payload = {
            "parameter": family.parameter,
            "values": list(family.values),
            "orbits": [_orbit_payload(o) for o in family.orbits],
        }
        _write_json(payload, args.output)
        if args.csv:
            with open(args.csv, "w", encoding="ascii") as fh:
                dim = len(seed)
                head = ",".join(["delta", "period", "residual"]
                                + [f"x{i+1}" for i in range(dim)])
                fh.write(head + "\n")
                for o in family.orbits:
                    row = [o.delta, o.period, o.residual, *o.anchor.tolist()]
                    fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
            print(f"wrote {args.csv}")
        return 0
    system = config.system(args.system)
    orb = shoot_orbit(system, seed, args.period)
    _write_json(_orbit_payload(orb), args.output)
    return 0


def _cmd_experiment(args) -> int:
    config = _load(args)
    if args.action == "list":
        for name in list_experiments(config):
            print(name)
        return 0
    if args.name is None:
        raise LVPoissonError(f"experiment {args.action} requires a name")
    if args.action == "run":
        artifacts = run_experiment(
            args.name, config=config, out_dir=args.out, solver_tol=args.tol
        )
        for fname in sorted(artifacts):
            print(f"wrote {artifacts[fname]}")
        return 0
    if args.action == "verify":
        verdict = verify_experiment(args.name, config=config, out_dir=args.out)
        for check in verdict.checks:
            mark = "PASS" if check.passed else "FAIL"
            print(f"[{mark}] {verdict.experiment}:{check.name}  {check.detail}")
        print(f"{'PASS' if verdict.passed else 'FAIL'} {verdict.experiment}")
        return 0 if verdict.passed else 1
    raise LVPoissonError(f"unknown experiment action {args.action!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lvpoisson",
        description="Structure-preserving integrators for Lotka-Volterra "
        "systems on cluster Poisson structures.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--config", help="config file (defaults to the bundled one)")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--tol", type=float, default=None, help="solver tolerance override")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run an integrator and write a trajectory CSV")
    p.add_argument("--system", required=True)
    p.add_argument("--integrator", default="hp1", choices=("hp1", "reference", "rk4_fixed"))
    p.add_argument("--x0", required=True, help="comma-separated start point")
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--output", help="output CSV path")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("spectrum", help="linearize and classify a singularity")
    p.add_argument("--system", help="system name from the config")
    p.add_argument("--point", help="evaluation point (defaults to the equilibrium)")
    p.add_argument("--delta", type=float, default=None,
                   help="use the closed-form delta-family matrix instead of a system")
    p.add_argument("--max-coeff", type=int, default=1000, help="resonance search bound")
    p.add_argument("--output", help="JSON report path (default: stdout)")
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("orbit", help="locate periodic orbits by shooting")
    p.add_argument("--system", help="system name (single-orbit mode)")
    p.add_argument("--seed", required=True, help="comma-separated anchor guess")
    p.add_argument("--period", type=float, required=True, help="period guess")
    p.add_argument("--delta-family", action="store_true",
                   help="continue along the built-in delta family")
    p.add_argument("--delta-from", type=float, default=0.0)
    p.add_argument("--delta-to", type=float, default=1e-2)
    p.add_argument("--delta-step", type=float, default=1e-3)
    p.add_argument("--csv", help="family CSV output path")
    p.add_argument("--output", help="JSON output path (default: stdout)")
    p.set_defaults(func=_cmd_orbit)

    p = sub.add_parser("experiment", help="run/verify the bundled experiments")
    p.add_argument("action", choices=("run", "verify", "list"))
    p.add_argument("name", nargs="?")
    p.set_defaults(func=_cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except LVPoissonError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
