"""Structure-preserving one-step methods for cluster Lotka-Volterra systems.

The main method (``hp1``) is the implicit step generated by the birealisation
of the cluster bracket: the current point and its successor are the two
endpoints ``alpha``/``beta`` of a stage point ``y`` carrying the scaled
energy gradient.  The step stays on the symplectic leaf, so every Casimir is
conserved to solver tolerance regardless of the step size.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError, StageDivergence, StepUnderflow
from .systems import (
    LVSystem,
    LogLinear,
    Monomial,
    casimir_basis,
    require_state,
    vector_field,
)
from .trajectory import Trajectory

INTEGRATORS = ("hp1", "reference", "rk4_fixed")


@dataclass(frozen=True)
class HPStepConfig:
    """Solver settings for the implicit stage equation.

    ``h`` is the time-step (h = 0 degenerates to the identity map).
    """

    h: float
    solver_tol: float = 1e-12
    max_iter: int = 100
    solver_kind: str = "fixed-point"

    def __post_init__(self):
        if self.h < 0:
            raise ValueError("time-step must be nonnegative")
        if self.solver_tol <= 0:
            raise ValueError("solver_tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.solver_kind not in ("fixed-point", "newton"):
            raise ValueError(f"unknown solver_kind {self.solver_kind!r}")


@dataclass(frozen=True)
class StepOutcome:
    next: np.ndarray
    stage: np.ndarray
    iterations: int
    residual: float


def alpha(sys: LVSystem, x, p) -> np.ndarray:
    """Birealisation map ``(exp(-1/2 sum_i a_ij x_i p_i) x_j)_j``."""
    x = require_state(x, sys.dim)
    p = np.asarray(p, dtype=float)
    return x * np.exp(-0.5 * (sys.A.T @ (x * p)))


def beta(sys: LVSystem, x, p) -> np.ndarray:
    """The paired map, ``beta(x, p) = alpha(x, -p)``."""
    return alpha(sys, x, -np.asarray(p, dtype=float))


def _solve_stage(sys: LVSystem, x, cfg: HPStepConfig) -> tuple[np.ndarray, int, float]:
    """Solve x = beta(y, h*gradH(y)) for the stage y.

    Fixed-point iteration contracts only for moderate h; the Newton fallback
    works in log coordinates (positivity is then automatic) with backtracking.
    Residuals are sup-norm defects of the stage equation in state space.
    """
    A, q, h = sys.A, sys.q, cfg.h
    y = np.array(x, dtype=float)
    iters = 0

    if cfg.solver_kind == "fixed-point":
        # y * gradH(y) = y - q collapses the exponent to A (y - q)
        z = A @ (y - q)
        best = np.inf
        worse = 0
        for _ in range(cfg.max_iter):
            with np.errstate(over="ignore"):
                y_new = x * np.exp(0.5 * h * z)
            iters += 1
            if not np.all(np.isfinite(y_new)):
                break
            z_new = A @ (y_new - q)
            with np.errstate(over="ignore"):
                resid = float(np.max(np.abs(x * np.expm1(0.5 * h * (z - z_new)))))
            y, z = y_new, z_new
            if resid < cfg.solver_tol:
                return y, iters, resid
            # bail to Newton once the iteration stops contracting
            if resid < best:
                best, worse = resid, 0
            else:
                worse += 1
                if worse >= 3:
                    break

    # damped Newton on u = log y:  u - (h/2) A (e^u - q) - log x = 0
    lx = np.log(x)
    u = lx.copy()
    n = sys.dim
    resid = np.inf
    for _ in range(cfg.max_iter):
        ey = np.exp(u)
        R = u - 0.5 * h * (A @ (ey - q)) - lx
        nR = float(np.max(np.abs(R)))
        resid = float(np.max(np.abs(x * np.expm1(R))))
        iters += 1
        if resid < cfg.solver_tol:
            return ey, iters, resid
        J = np.eye(n) - 0.5 * h * A * ey[None, :]
        try:
            du = np.linalg.solve(J, -R)
        except np.linalg.LinAlgError as exc:
            raise StageDivergence(
                f"singular stage Jacobian at residual {resid:.3e}",
                residual=resid,
                iterations=iters,
            ) from exc
        lam = 1.0
        while lam > 1e-12:
            u_try = u + lam * du
            ey_try = np.exp(u_try)
            if np.all(np.isfinite(ey_try)):
                R_try = u_try - 0.5 * h * (A @ (ey_try - q)) - lx
                if float(np.max(np.abs(R_try))) < nR:
                    u = u_try
                    break
            lam *= 0.5
        else:
            raise StageDivergence(
                f"stage Newton stalled at residual {resid:.3e} "
                "(time-step too large for the stage equation)",
                residual=resid,
                iterations=iters,
            )
    raise StageDivergence(
        f"stage equation unresolved after {iters} iterations "
        f"(residual {resid:.3e}); reduce the time-step",
        residual=resid,
        iterations=iters,
    )


def hp_step(sys: LVSystem, x, cfg: HPStepConfig) -> StepOutcome:
    """One step of the implicit birealisation integrator.

    Solves the stage equation relating x to the intermediary point y, then
    evaluates the paired birealisation map at y.  Equilibria of the vector
    field are exact fixed points of the step.
    """
    x = require_state(x, sys.dim)
    if cfg.h == 0.0:
        return StepOutcome(next=x.copy(), stage=x.copy(), iterations=0, residual=0.0)
    y, iters, resid = _solve_stage(sys, x, cfg)
    if np.any(y <= 0.0) or not np.all(np.isfinite(y)):
        raise DomainError("stage point left the positive quadrant")
    nxt = x * np.exp(cfg.h * (sys.A @ (y - sys.q)))
    return StepOutcome(next=nxt, stage=y, iterations=iters, residual=resid)


def hp_modified_hamiltonian_check(sys: LVSystem, x, h: float) -> float:
    """Energy at the solved stage point, H(y); the value of the scheme's
    time-dependent Hamiltonian along the run."""
    from .systems import hamiltonian

    x = require_state(x, sys.dim)
    if h == 0.0:
        return hamiltonian(sys, x)
    y, _, _ = _solve_stage(sys, x, HPStepConfig(h=h))
    return hamiltonian(sys, y)


def symplectic_euler_step(u: float, v: float, h: float) -> tuple[float, float]:
    """Symplectic Euler for the harmonic oscillator; the linear map
    [[1 - h^2, h], [-h, 1]] with unit determinant."""
    return (u + h * v - h * h * u, v - h * u)


def se_step_matrix(h: float) -> np.ndarray:
    return np.array([[1.0 - h * h, h], [-h, 1.0]])


def rk4_step(sys: LVSystem, x, h: float) -> np.ndarray:
    """Classical explicit 4-stage step; non-geometric drift contrast."""
    k1 = vector_field(sys, x)
    k2 = vector_field(sys, x + 0.5 * h * k1)
    k3 = vector_field(sys, x + 0.5 * h * k2)
    k4 = vector_field(sys, x + h * k3)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _solve_lv(sys: LVSystem, x0, t_span, t_eval, tol: float):
    sol = solve_ivp(
        lambda _t, x: x * (sys.eps + sys.A @ x),
        t_span,
        x0,
        method="DOP853",
        rtol=tol,
        atol=tol,
        t_eval=t_eval,
        dense_output=False,
    )
    if not sol.success:
        raise StepUnderflow(f"reference integration failed: {sol.message}")
    return sol


def reference_flow(sys: LVSystem, x, t: float, tol: float = 1e-13) -> np.ndarray:
    """High-order adaptive oracle flow Phi_t(x) to local tolerance tol."""
    x = require_state(x, sys.dim)
    if tol < 1e-14:
        raise ValueError("tol below 1e-14 is not resolvable in double precision")
    if t == 0.0:
        return x.copy()
    sol = _solve_lv(sys, x, (0.0, t), None, tol)
    return sol.y[:, -1]


def _diagnostic_evaluators(sys: LVSystem):
    """Names and a vectorized row evaluator for H, Casimirs and declared
    first integrals."""
    basis = casimir_basis(sys)
    cas = np.array(basis.exponents) if len(basis) else np.empty((0, sys.dim))
    names = ["H"] + [f"C{i + 1}" for i in range(cas.shape[0])]
    lin_rows, log_rows, fi_names = [], [], []
    for fi in sys.first_integrals:
        fi_names.append(fi.name)
        if isinstance(fi, LogLinear):
            lin_rows.append(fi.linear)
            log_rows.append(fi.log)
        elif isinstance(fi, Monomial):
            lin_rows.append(np.zeros(sys.dim))
            log_rows.append(fi.exponents)
        else:  # pragma: no cover - FirstIntegral union is closed
            raise TypeError(f"unsupported first integral {fi!r}")
    L = np.array(lin_rows) if lin_rows else np.empty((0, sys.dim))
    G = np.array(log_rows) if log_rows else np.empty((0, sys.dim))
    mono_mask = np.array(
        [isinstance(fi, Monomial) for fi in sys.first_integrals], dtype=bool
    )
    q = sys.q

    def row(x: np.ndarray) -> np.ndarray:
        logx = np.log(x)
        out = np.empty(1 + cas.shape[0] + L.shape[0])
        out[0] = np.sum(x - q * logx)
        out[1 : 1 + cas.shape[0]] = np.exp(cas @ logx) if cas.shape[0] else ()
        if L.shape[0]:
            vals = L @ x + G @ logx
            vals[mono_mask] = np.exp((G @ logx)[mono_mask])
            out[1 + cas.shape[0] :] = vals
        return out

    return names + fi_names, row


def simulate(
    sys: LVSystem,
    integrator: str,
    x0,
    h: float,
    n: int,
    cfg: HPStepConfig | None = None,
    oracle_tol: float = 1e-13,
) -> Trajectory:
    """Run ``n`` steps and record states plus conservation diagnostics.

    Step failures are re-raised with the failing step index attached.
    """
    if integrator not in INTEGRATORS:
        raise ValueError(f"unknown integrator {integrator!r}; choose from {INTEGRATORS}")
    x0 = require_state(x0, sys.dim)
    if n < 0:
        raise ValueError("step count must be nonnegative")
    names, diag_row = _diagnostic_evaluators(sys)

    m = n + 1
    times = h * np.arange(m)
    states = np.empty((m, sys.dim))
    diag = np.empty((m, len(names)))
    stage_iters = np.zeros(m, dtype=int)
    stage_resid = np.zeros(m)
    states[0] = x0
    diag[0] = diag_row(x0)

    if integrator == "reference" and n > 0:
        sol = _solve_lv(sys, x0, (0.0, times[-1]), times, oracle_tol)
        states[:] = sol.y.T
        for i in range(1, m):
            diag[i] = diag_row(states[i])
    else:
        step_cfg = cfg if cfg is not None else HPStepConfig(h=h)
        if cfg is not None and cfg.h != h:
            raise ValueError("cfg.h must match the simulation step h")
        x = x0
        for i in range(1, m):
            try:
                if integrator == "hp1":
                    out = hp_step(sys, x, step_cfg)
                    x = out.next
                    stage_iters[i] = out.iterations
                    stage_resid[i] = out.residual
                else:
                    x = rk4_step(sys, x, h)
                x = require_state(x, sys.dim)
            except (StageDivergence, DomainError) as exc:
                exc.args = (f"step {i}: {exc.args[0] if exc.args else exc}",) + exc.args[1:]
                raise
            states[i] = x
            diag[i] = diag_row(x)

    diagnostics = {name: diag[:, j].copy() for j, name in enumerate(names)}
    diagnostics["stage_iters"] = stage_iters
    diagnostics["stage_residual"] = stage_resid
    return Trajectory(times=times, states=states, diagnostics=diagnostics)


def se_simulate(
    u0: float, v0: float, h: float, n: int, stop_norm2: float | None = None
) -> Trajectory:
    """Iterate symplectic Euler on the harmonic oscillator, logging the
    quadratic energy (u^2 + v^2)/2.

    ``stop_norm2`` truncates a hyperbolic run right after |x|^2 first
    exceeds the bound, keeping escape artifacts finite on disk.
    """
    m = n + 1
    times = h * np.arange(m)
    states = np.empty((m, 2))
    states[0] = (u0, v0)
    u, v = float(u0), float(v0)
    rows = m
    for i in range(1, m):
        u, v = symplectic_euler_step(u, v, h)
        states[i] = (u, v)
        if stop_norm2 is not None and u * u + v * v > stop_norm2:
            rows = i + 1
            break
    states = states[:rows]
    H = 0.5 * (states[:, 0] ** 2 + states[:, 1] ** 2)
    return Trajectory(
        times=times[:rows],
        states=states,
        diagnostics={
            "H": H,
            "stage_iters": np.zeros(rows, dtype=int),
            "stage_residual": np.zeros(rows),
        },
    )
