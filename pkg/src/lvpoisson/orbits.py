"""Periodic-orbit detection, monodromy, and continuation.

Orbits are located by Newton iteration on the return defect
``Theta(x, T) = Phi_T(x) - x``.  Anchor displacements are confined to the
tangent space of the energy level *and* of every Casimir level through the
initial guess (the symplectic leaf), with a phase condition orthogonal to
the flow direction; the period is the remaining unknown.  The residual is
projected onto the same subspace, which yields a square, well-conditioned
reduced system.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .analysis import TangentBasis, linearize, spectrum
from .errors import ContinuationStall, NoConvergence, SingularReduced, StepUnderflow
from .systems import (
    LVSystem,
    casimir_basis,
    grad_hamiltonian,
    hamiltonian,
    require_state,
    vector_field,
)

SHOOT_TOL = 1e-9
MAX_NEWTON = 50
COND_LIMIT = 1e12


@dataclass(frozen=True)
class PeriodicOrbit:
    """A closed trajectory: anchor point, period and shooting defect."""

    anchor: np.ndarray
    period: float
    delta: float
    residual: float
    energy: float

    def __post_init__(self):
        a = np.asarray(self.anchor, dtype=float)
        a.setflags(write=False)
        object.__setattr__(self, "anchor", a)
        if not self.period > 0:
            raise ValueError(f"period must be positive, got {self.period}")
        if not self.residual <= SHOOT_TOL:
            raise ValueError(
                f"orbit residual {self.residual:.3e} exceeds {SHOOT_TOL:.0e}"
            )


@dataclass(frozen=True)
class OrbitFamily:
    """Orbits parametrized by the continuation variable (delta or eta)."""

    parameter: str
    values: tuple[float, ...]
    orbits: tuple[PeriodicOrbit | None, ...]
    tangent_at_singularity: TangentBasis | None = None

    def __len__(self) -> int:
        return len(self.orbits)

    @property
    def gaps(self) -> tuple[float, ...]:
        """Parameter values where the corrector failed."""
        return tuple(
            v for v, orb in zip(self.values, self.orbits) if orb is None
        )


def flow_and_monodromy(
    sys: LVSystem, x, T: float, tol: float = 1e-12
) -> tuple[np.ndarray, np.ndarray]:
    """Joint state/first-variation integration: returns Phi_T(x) and its
    differential with respect to x."""
    x = require_state(x, sys.dim)
    n = sys.dim
    if T == 0.0:
        return x.copy(), np.eye(n)

    A, eps = sys.A, sys.eps

    def rhs(_t, s):
        xx = s[:n]
        M = s[n:].reshape(n, n)
        J = np.diag(eps + A @ xx) + xx[:, None] * A
        return np.concatenate([xx * (eps + A @ xx), (J @ M).ravel()])

    s0 = np.concatenate([x, np.eye(n).ravel()])
    sol = solve_ivp(rhs, (0.0, T), s0, method="DOP853", rtol=tol, atol=tol)
    if not sol.success:
        raise StepUnderflow(f"variational integration failed: {sol.message}")
    return sol.y[:n, -1], sol.y[n:, -1].reshape(n, n)


def _orth_complement(rows: np.ndarray) -> np.ndarray:
    """Orthonormal basis (columns) of the complement of span(rows)."""
    B = np.atleast_2d(rows).T
    Q, _ = np.linalg.qr(B, mode="complete")
    r = np.linalg.matrix_rank(B, tol=1e-10)
    return Q[:, r:]


def _leaf_constraints(sys: LVSystem, x0: np.ndarray) -> np.ndarray:
    """Gradient rows of the conserved quantities pinning the shooting:
    energy plus every Casimir (log-gradient direction v/x)."""
    rows = [grad_hamiltonian(sys, x0)]
    for v in casimir_basis(sys).exponents:
        rows.append(v / x0)
    return np.vstack(rows)


def shoot_orbit(
    sys: LVSystem,
    x0_guess,
    T_guess: float,
    *,
    delta: float = 0.0,
    tol: float = SHOOT_TOL,
    max_iter: int = MAX_NEWTON,
    oracle_tol: float = 1e-12,
) -> PeriodicOrbit:
    """Newton shooting for a periodic orbit near (x0_guess, T_guess).

    The guess must lie in the Newton basin; convergence requires the full
    return defect to satisfy ``||Theta||_inf <= tol``.

    Raises
    ------
    NoConvergence
        After ``max_iter`` Newton steps without meeting the tolerance.
    SingularReduced
        If the reduced Jacobian's condition number exceeds 1e12.
    """
    x0_guess = require_state(x0_guess, sys.dim)
    if T_guess <= 0:
        raise ValueError("period guess must be positive")
    n = sys.dim

    G = _leaf_constraints(sys, x0_guess)
    X0 = vector_field(sys, x0_guess)
    P = _orth_complement(G)                       # residual test space
    W = _orth_complement(np.vstack([G, X0]))      # anchor displacement space

    x, T = x0_guess.copy(), float(T_guess)
    resid = np.inf
    for _ in range(max_iter):
        xT, M = flow_and_monodromy(sys, x, T, tol=oracle_tol)
        theta = xT - x
        resid = float(np.max(np.abs(theta)))
        if resid <= tol:
            return PeriodicOrbit(
                anchor=x,
                period=T,
                delta=float(delta),
                residual=resid,
                energy=hamiltonian(sys, x),
            )
        J = np.hstack(
            [P.T @ ((M - np.eye(n)) @ W), (P.T @ vector_field(sys, xT))[:, None]]
        )
        cond = np.linalg.cond(J)
        if not np.isfinite(cond) or cond > COND_LIMIT:
            raise SingularReduced(
                f"reduced shooting Jacobian condition {cond:.2e} exceeds {COND_LIMIT:.0e}"
            )
        upd = np.linalg.solve(J, -(P.T @ theta))

        # damped update: keep the defect decreasing and the anchor in Q+
        lam = 1.0
        while lam > 1e-6:
            x_try = x + W @ (lam * upd[:-1])
            T_try = T + lam * upd[-1]
            if T_try > 0 and np.all(x_try > 0):
                th_try = flow_and_monodromy(sys, x_try, T_try, tol=oracle_tol)[0] - x_try
                if float(np.max(np.abs(th_try))) < resid:
                    x, T = x_try, T_try
                    break
            lam *= 0.5
        else:
            raise NoConvergence(
                f"shooting stalled at residual {resid:.3e} (tol {tol:.0e})"
            )
    raise NoConvergence(
        f"no convergence after {max_iter} Newton steps; residual {resid:.3e}"
    )


def continue_in_delta(
    sys_family: Callable[[float], LVSystem],
    orbit0: PeriodicOrbit,
    deltas: Sequence[float],
    *,
    tol: float = SHOOT_TOL,
) -> OrbitFamily:
    """Predictor-corrector continuation of a periodic orbit along delta.

    The previous anchor/period seed each correction.  Steps are limited to
    1e-3 so the plain predictor stays inside the Newton basin.
    """
    deltas = [float(d) for d in deltas]
    if not deltas:
        raise ValueError("empty continuation range")
    if abs(deltas[0] - orbit0.delta) > 1e-12:
        raise ValueError(
            f"deltas[0] = {deltas[0]} does not match the seed orbit ({orbit0.delta})"
        )
    steps = np.abs(np.diff(deltas))
    if steps.size and steps.max() > 1e-3 + 1e-15:
        raise ValueError("continuation steps must not exceed 1e-3")

    orbits: list[PeriodicOrbit] = [orbit0]
    x, T = orbit0.anchor, orbit0.period
    for d in deltas[1:]:
        sys_d = sys_family(d)
        try:
            orb = shoot_orbit(sys_d, x, T, delta=d, tol=tol)
        except (NoConvergence, SingularReduced) as exc:
            raise ContinuationStall(
                f"continuation stalled at delta={d:g}: {exc}",
                last_good=orbits[-1].delta,
                family=OrbitFamily(
                    parameter="delta",
                    values=tuple(o.delta for o in orbits),
                    orbits=tuple(orbits),
                ),
            ) from exc
        if abs(orb.period - T) > 0.5:
            raise ContinuationStall(
                f"period jumped by {abs(orb.period - T):.3f} at delta={d:g}",
                last_good=orbits[-1].delta,
            )
        orbits.append(orb)
        x, T = orb.anchor, orb.period
    return OrbitFamily(
        parameter="delta",
        values=tuple(deltas),
        orbits=tuple(orbits),
    )


def _seed_frequency(sys: LVSystem, tangent: TangentBasis) -> float:
    """Eigenfrequency of the pair whose eigenplane aligns best with the
    seeding tangent plane."""
    rep = spectrum(linearize(sys, sys.q))
    w, V = np.linalg.eig(np.asarray(rep.matrix))
    plane = tangent.plane()
    best, best_overlap = None, -1.0
    scale = max(1.0, float(np.max(np.abs(w))))
    for j in range(len(w)):
        if np.imag(w[j]) <= 1e-10 * scale:
            continue
        vec = V[:, j]
        B = np.stack([np.real(vec), np.imag(vec)], axis=1)
        Q, _ = np.linalg.qr(B)
        overlap = float(np.sum(np.linalg.svd(plane.T @ Q, compute_uv=False) ** 2))
        if overlap > best_overlap:
            best_overlap, best = overlap, float(np.imag(w[j]))
    if best is None:
        raise ValueError("linearization has no elliptic pair to seed from")
    return best


def amplitude_family(
    sys: LVSystem,
    tangent: TangentBasis,
    etas: Sequence[float],
    *,
    eta_max: float = 0.5,
    delta: float = 0.0,
    tol: float = SHOOT_TOL,
) -> OrbitFamily:
    """Sample a Lyapunov family at amplitudes ``eta``.

    Each orbit is seeded at ``q + eta (u + v)`` with period ``2 pi / omega``
    from the matching eigenfrequency, then corrected by shooting.  Failed
    amplitudes are recorded as gaps rather than aborting the family.
    """
    etas = [float(e) for e in etas]
    if any(e <= 0 for e in etas):
        raise ValueError("amplitudes must be positive (the singularity itself is not an orbit)")
    if any(e > eta_max for e in etas):
        raise ValueError(f"amplitude exceeds configured cap {eta_max}")
    omega = _seed_frequency(sys, tangent)
    T0 = 2.0 * np.pi / omega
    orbits: list[PeriodicOrbit | None] = []
    for eta in etas:
        x0 = sys.q + eta * (tangent.u + tangent.v)
        try:
            orbits.append(shoot_orbit(sys, x0, T0, delta=delta, tol=tol))
        except (NoConvergence, SingularReduced):
            orbits.append(None)
    return OrbitFamily(
        parameter="eta",
        values=tuple(etas),
        orbits=tuple(orbits),
        tangent_at_singularity=tangent,
    )
