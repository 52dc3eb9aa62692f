"""Config documents: named systems, experiments, and tolerance settings.

The on-disk format is YAML.  A system entry uses the keys ``dim``, ``A``
(row-major nested arrays), ``eps``, optional ``q_reference`` and optional
``first_integrals``; these names are part of the CLI contract.  The harmonic
oscillator is declared with ``kind: canonical`` (udot = v, vdot = -u) rather
than being forced into Lotka-Volterra form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources

import numpy as np
import yaml

from .errors import (
    NoPositiveFixedPoint,
    NotAntisymmetric,
    ParseError,
    ValidationError,
)
from .systems import FirstIntegral, LVSystem, LogLinear, Monomial, build_system

BUNDLED_CONFIG = "paper_systems.yaml"


@dataclass(frozen=True)
class CanonicalSystem:
    """Planar canonical toy system udot = v, vdot = -u."""

    dim: int = 2

    @staticmethod
    def energy(u: float, v: float) -> float:
        return 0.5 * (u * u + v * v)

    @staticmethod
    def linearization() -> np.ndarray:
        return np.array([[0.0, 1.0], [-1.0, 0.0]])


SystemEntry = LVSystem | CanonicalSystem


@dataclass(frozen=True)
class Tolerances:
    solver_tol: float = 1e-12
    oracle_tol: float = 1e-13
    report_tol: float = 1e-9


@dataclass(frozen=True)
class ConfigDocument:
    systems: dict[str, SystemEntry]
    experiments: dict[str, dict] = field(default_factory=dict)
    tolerances: Tolerances = field(default_factory=Tolerances)

    def system(self, name: str) -> SystemEntry:
        if name not in self.systems:
            raise ValidationError(
                f"unknown system {name!r}; available: {sorted(self.systems)}"
            )
        return self.systems[name]


def _parse_first_integral(entry: dict, dim: int, ctx: str) -> FirstIntegral:
    if not isinstance(entry, dict) or "name" not in entry:
        raise ValidationError(f"{ctx}: first integral entries need a 'name'")
    name = str(entry["name"])
    if "exponents" in entry:
        v = np.asarray(entry["exponents"], dtype=float)
        if v.shape != (dim,):
            raise ValidationError(f"{ctx}: integral {name!r} exponents must have length {dim}")
        return Monomial(name, v)
    if "linear" in entry or "log" in entry:
        lin = np.asarray(entry.get("linear", np.zeros(dim)), dtype=float)
        log = np.asarray(entry.get("log", np.zeros(dim)), dtype=float)
        if lin.shape != (dim,) or log.shape != (dim,):
            raise ValidationError(f"{ctx}: integral {name!r} coefficients must have length {dim}")
        return LogLinear(name, lin, log)
    raise ValidationError(
        f"{ctx}: integral {name!r} needs 'exponents' or 'linear'/'log' coefficients"
    )


def _parse_system(name: str, doc: dict) -> SystemEntry:
    ctx = f"system {name!r}"
    if not isinstance(doc, dict):
        raise ValidationError(f"{ctx}: expected a mapping")
    kind = doc.get("kind", "lv")
    if kind == "canonical":
        if int(doc.get("dim", 2)) != 2:
            raise ValidationError(f"{ctx}: canonical systems are 2-dimensional")
        return CanonicalSystem()
    if kind != "lv":
        raise ValidationError(f"{ctx}: unknown kind {kind!r}")

    for key in ("dim", "A", "eps"):
        if key not in doc:
            raise ValidationError(f"{ctx}: missing required key {key!r}")
    dim = int(doc["dim"])
    A = doc["A"]
    if (
        not isinstance(A, list)
        or len(A) != dim
        or any(not isinstance(r, list) or len(r) != dim for r in A)
    ):
        raise ValidationError(f"{ctx}: 'A' must be a {dim}x{dim} row-major nested array")
    eps = np.asarray(doc["eps"], dtype=float)
    if eps.shape != (dim,):
        raise ValidationError(f"{ctx}: 'eps' must have length {dim}")
    q_ref = doc.get("q_reference")
    if q_ref is not None:
        q_ref = np.asarray(q_ref, dtype=float)
        if q_ref.shape != (dim,):
            raise ValidationError(f"{ctx}: 'q_reference' must have length {dim}")
    integrals = tuple(
        _parse_first_integral(e, dim, ctx) for e in doc.get("first_integrals", [])
    )
    try:
        return build_system(np.asarray(A, dtype=float), eps, q_ref, integrals)
    except (NotAntisymmetric, NoPositiveFixedPoint) as exc:
        raise ValidationError(f"{ctx}: {type(exc).__name__}: {exc}") from exc


def _parse_tolerances(doc: dict) -> Tolerances:
    base = Tolerances()
    vals = {}
    for key in ("solver_tol", "oracle_tol", "report_tol"):
        v = doc.get(key, getattr(base, key))
        try:
            v = float(v)
        except (TypeError, ValueError):
            raise ValidationError(f"tolerances: {key} must be a number")
        if v <= 0:
            raise ValidationError(f"tolerances: {key} must be positive")
        vals[key] = v
    return Tolerances(**vals)


def parse_config(text: str, source: str = "<string>") -> ConfigDocument:
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ParseError(f"{source}: {exc}") from exc
    if doc is None:
        raise ParseError(f"{source}: empty config document")
    if not isinstance(doc, dict):
        raise ParseError(f"{source}: top level must be a mapping")
    systems_doc = doc.get("systems", {})
    if not isinstance(systems_doc, dict):
        raise ValidationError(f"{source}: 'systems' must be a mapping")
    systems = {name: _parse_system(name, sd) for name, sd in systems_doc.items()}
    experiments = doc.get("experiments", {})
    if not isinstance(experiments, dict):
        raise ValidationError(f"{source}: 'experiments' must be a mapping")
    for exp_name, exp in experiments.items():
        if not isinstance(exp, dict):
            raise ValidationError(f"experiment {exp_name!r}: expected a mapping")
        ref = exp.get("system")
        if ref is not None and ref not in systems:
            raise ValidationError(
                f"experiment {exp_name!r}: references unknown system {ref!r}"
            )
    tolerances = _parse_tolerances(doc.get("tolerances", {}) or {})
    return ConfigDocument(systems=systems, experiments=experiments, tolerances=tolerances)


def load_config(path) -> ConfigDocument:
    """Parse and fully validate a config file.

    Raises :class:`ParseError` for malformed YAML and :class:`ValidationError`
    (naming the violated invariant) for well-formed but inconsistent content.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, source=str(path))


def bundled_config() -> ConfigDocument:
    """The packaged config with the four reference systems."""
    text = resources.files("lvpoisson").joinpath("data", BUNDLED_CONFIG).read_text()
    return parse_config(text, source=f"bundled:{BUNDLED_CONFIG}")


__all__ = [
    "CanonicalSystem",
    "ConfigDocument",
    "Tolerances",
    "bundled_config",
    "load_config",
    "parse_config",
]
