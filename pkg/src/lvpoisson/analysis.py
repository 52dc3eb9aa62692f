"""Linearization, spectral classification, and drift diagnostics.

Covers the elliptic-singularity machinery: Jacobians of the flow at
equilibria, eigenvalue/resonance classification, the closed-form spectral
model of the delta family, and backward-error style drift reports for
discrete trajectories.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularFormula
from .systems import LVSystem, require_state
from .trajectory import Trajectory

_IMAG_TOL = 1e-10


def linearize(sys: LVSystem, x) -> np.ndarray:
    """Analytic Jacobian of the LV field:
    ``d xdot_j / d x_k = delta_jk (eps_j + (A x)_j) + a_jk x_j``."""
    x = require_state(x, sys.dim)
    return np.diag(sys.eps + sys.A @ x) + x[:, None] * sys.A


@dataclass(frozen=True)
class SpectrumReport:
    """Eigenvalues of a linearization with ellipticity classification."""

    matrix: np.ndarray
    eigenvalues: np.ndarray
    zero_count: int
    elliptic: bool
    resonance: np.ndarray | None = None
    resonance_bound: int | None = None

    def frequencies(self) -> np.ndarray:
        """Positive imaginary parts, one per conjugate pair, descending."""
        w = self.eigenvalues
        scale = max(1.0, float(np.max(np.abs(w))) if w.size else 1.0)
        freqs = np.imag(w[np.imag(w) > _IMAG_TOL * scale])
        return np.sort(freqs)[::-1]


def spectrum(M, resonance_max_coeff: int | None = None) -> SpectrumReport:
    """Numerical eigenvalues with zero/elliptic classification.

    A matrix is classified elliptic when every nonzero eigenvalue is purely
    imaginary (they then come in conjugate pairs).  Optionally runs
    :func:`resonance_search` on the frequency list.
    """
    M = np.asarray(M, dtype=float)
    w = np.linalg.eigvals(M)
    scale = max(1.0, float(np.max(np.abs(w))) if w.size else 1.0)
    zero = np.abs(w) <= _IMAG_TOL * scale
    nonzero = w[~zero]
    elliptic = bool(nonzero.size) and bool(
        np.all(np.abs(np.real(nonzero)) <= _IMAG_TOL * scale)
    )
    resonance = None
    if resonance_max_coeff is not None:
        resonance = resonance_search(w, resonance_max_coeff)
    return SpectrumReport(
        matrix=M,
        eigenvalues=w,
        zero_count=int(np.sum(zero)),
        elliptic=elliptic,
        resonance=resonance,
        resonance_bound=None if resonance_max_coeff is None else int(resonance_max_coeff),
    )


def _frequencies_of(eigenvalues) -> np.ndarray:
    """Complex spectra reduce to one frequency per conjugate pair, sorted
    descending; plain frequency lists keep their given order."""
    vals = np.asarray(eigenvalues)
    if np.iscomplexobj(vals):
        scale = max(1.0, float(np.max(np.abs(vals))) if vals.size else 1.0)
        freqs = np.abs(np.imag(vals[np.imag(vals) > _IMAG_TOL * scale]))
        return np.sort(freqs)[::-1]
    return np.abs(vals.astype(float))


def resonance_search(eigenvalues, max_coeff: int) -> np.ndarray | None:
    """Search integer relations ``sum_j nu_j omega_j = 0`` up to a bound.

    Accepts either complex eigenvalues (reduced to one frequency per
    conjugate pair) or a plain frequency list.  Returns the first relation
    with ``|nu_j| <= max_coeff`` and ``|sum nu_j omega_j| < 1e-9 ||nu||``,
    or None when no relation exists within the bound.  Exhaustive
    (lattice-rounding) search; supported for up to three frequencies.
    """
    if max_coeff < 1 or max_coeff > 10**6:
        raise ValueError("max_coeff must be in [1, 1e6]")
    om = _frequencies_of(eigenvalues)
    r = om.size
    if r == 0:
        return None
    if r > 3:
        raise ValueError("exhaustive resonance search supported for r <= 3")
    tol = 1e-9

    if r == 1:
        if abs(om[0]) < tol:
            return np.array([1])
        return None

    if r == 2:
        w1, w2 = om
        for n1 in range(0, max_coeff + 1):
            target = -n1 * w1 / w2 if w2 != 0 else 0.0
            for n2 in {int(np.floor(target)), int(np.ceil(target))}:
                if n1 == 0 and n2 == 0:
                    continue
                if abs(n2) > max_coeff:
                    continue
                nu = np.array([n1, n2])
                if abs(n1 * w1 + n2 * w2) < tol * np.linalg.norm(nu):
                    return nu
        return None

    w1, w2, w3 = om
    if abs(w3) < tol:
        return np.array([0, 0, 1])
    # scan n2 by increasing magnitude so the first hit is a small relation
    n2_grid = np.arange(-max_coeff, max_coeff + 1)
    n2_grid = n2_grid[np.argsort(np.abs(n2_grid) - 0.25 * np.sign(n2_grid), kind="stable")]
    for n1 in range(0, max_coeff + 1):
        partial = n1 * w1 + n2_grid * w2
        target = -partial / w3
        for n3 in (np.floor(target), np.ceil(target)):
            ok = np.abs(n3) <= max_coeff
            resid = np.abs(partial + n3 * w3)
            norms = np.sqrt(n1 * n1 + n2_grid**2 + n3**2)
            nontrivial = norms > 0
            hit = ok & nontrivial & (resid < tol * np.maximum(norms, 1e-300))
            idx = np.flatnonzero(hit)
            if idx.size:
                j = idx[0]
                return np.array([n1, int(n2_grid[j]), int(n3[j])])
    return None


# ---------------------------------------------------------------------------
# Closed-form spectral model of the delta family
# ---------------------------------------------------------------------------

def delta_spectral_matrix(delta: float) -> np.ndarray:
    """Reference matrix for the delta family's spectrum at the equilibrium.

    Its characteristic polynomial is exactly
    ``lambda (lambda^4 + (d^2+d+4) lambda^2 + (d^2+3d+3))``, which is the
    closed form used for all eigenvalue cross-checks of the family.
    """
    d = float(delta)
    return np.array(
        [
            [0.0, -1.0, -1.0, 0.0, 0.0],
            [1.0, 0.0, 1.0, d, 0.0],
            [1.0, -1.0, 0.0, 0.0, 0.0],
            [0.0, -d, 0.0, 0.0, 1.0],
            [0.0, 0.0, 0.0, -1.0 - d, 0.0],
        ]
    )


def delta_char_poly_coeffs(delta: float) -> tuple[float, float]:
    """Coefficients (a, b) of the quartic factor ``X^2 + a X + b`` in
    ``lambda^4 + a lambda^2 + b``."""
    d = float(delta)
    return d * d + d + 4.0, d * d + 3.0 * d + 3.0


def delta_analytic_eigenvalues(delta: float) -> np.ndarray:
    """Closed-form spectrum {0, +-i sqrt(-X1), +-i sqrt(-X2)} where X1, X2
    are the roots of ``X^2 + a X + b`` (standard discriminant a^2 - 4b)."""
    a, b = delta_char_poly_coeffs(delta)
    disc = a * a - 4.0 * b
    if disc < 0:
        raise ValueError(f"negative discriminant {disc} for delta={delta}")
    x1 = 0.5 * (-a - np.sqrt(disc))
    x2 = 0.5 * (-a + np.sqrt(disc))
    w1, w2 = np.sqrt(-x1), np.sqrt(-x2)
    return np.array([0.0, 1j * w1, -1j * w1, 1j * w2, -1j * w2])


def lyapunov_eigenvector(delta: float, lam: complex) -> np.ndarray:
    """Closed-form eigenvector of :func:`delta_spectral_matrix` at eigenvalue
    ``lam``.

    Valid whenever ``lam**2 + 1 != 0``; for delta = 0 the slow-pair limit
    along the branch (lam -> +-i) is returned instead.  Scaled so the second
    component equals ``delta + lam^2 + 1``.

    The slow branch has ``delta + lam^2 + 1 = O(delta^3)``, so the formula is
    evaluated in extended precision after polishing ``lam`` on the quartic
    factor of the characteristic polynomial; plain double arithmetic would
    lose the residual bound already at delta ~ 1e-4.
    """
    import mpmath as mp

    d = float(delta)
    lam = complex(lam)
    pole = lam * lam + 1.0
    if abs(pole) < 1e-8:
        if d != 0.0:
            raise SingularFormula(
                f"formula pole: |lambda^2 + 1| = {abs(pole):.2e} with delta != 0"
            )
        # continuous limit of the slow branch: the planar-pair eigenvector
        return np.array([0.0, 0.0, 0.0, -lam, 1.0], dtype=complex)

    with mp.workdps(40):
        dd = mp.mpf(d)
        ll = mp.mpc(lam)
        a = dd * dd + dd + 4
        b = dd * dd + 3 * dd + 3
        P = ll**4 + a * ll * ll + b
        # Newton-polish eigenvalues of the quartic factor; leave other
        # inputs (e.g. the zero eigenvalue) untouched
        if abs(P) < 1e-3:
            for _ in range(4):
                dP = 4 * ll**3 + 2 * a * ll
                if abs(dP) < 1e-8:
                    break
                ll = ll - (ll**4 + a * ll * ll + b) / dP
        pole_mp = ll * ll + 1
        s = dd + ll * ll + 1
        vec = [
            (1 - ll) * s / pole_mp,
            s,
            -(1 + ll) * s / pole_mp,
            -dd * ll,
            dd * (dd + 1),
        ]
        return np.array([complex(v) for v in vec])


@dataclass(frozen=True)
class TangentBasis:
    """Real plane spanned by the real/imaginary parts of an eigenvector."""

    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        v = np.asarray(self.v, dtype=float)
        if np.linalg.matrix_rank(np.vstack([u, v]), tol=1e-12) < 2:
            raise ValueError("tangent basis vectors are linearly dependent")
        u.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    def plane(self) -> np.ndarray:
        """Orthonormal basis (columns) of span{u, v}."""
        Q, _ = np.linalg.qr(np.stack([self.u, self.v], axis=1))
        return Q


def lyapunov_tangent_basis(delta: float, branch: int = 1) -> TangentBasis:
    """Tangent plane of a Lyapunov family of the delta system at q_delta.

    Branch 1 is the fast pair (frequency near sqrt(3)), branch 2 the slow
    pair (frequency near 1).  Basis vectors are normalized to unit length.
    """
    if branch not in (1, 2):
        raise ValueError("branch must be 1 or 2")
    ev = delta_analytic_eigenvalues(delta)
    lam = ev[1] if branch == 1 else ev[3]
    x = lyapunov_eigenvector(delta, lam)
    u, v = np.real(x), np.imag(x)
    return TangentBasis(u=u / np.linalg.norm(u), v=v / np.linalg.norm(v))


def principal_angles(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Principal angles between the column spans of P and Q."""
    Pq, _ = np.linalg.qr(np.asarray(P, dtype=float))
    Qq, _ = np.linalg.qr(np.asarray(Q, dtype=float))
    sv = np.linalg.svd(Pq.T @ Qq, compute_uv=False)
    return np.arccos(np.clip(sv, -1.0, 1.0))


# ---------------------------------------------------------------------------
# Symplectic Euler on the harmonic oscillator
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SEModifiedHamiltonian:
    """Order-2 truncated modified energy of symplectic Euler.

    ``quad`` are the coefficients (c_uu, c_vv, c_uv) of
    ``c_uu u^2 + c_vv v^2 + c_uv u v``; ``char_poly`` the coefficients
    (1, 0, c0) of the linearization's characteristic polynomial.
    """

    quad: tuple[float, float, float]
    char_poly: tuple[float, float, float]
    elliptic: bool


def se_modified_hamiltonian(h: float) -> SEModifiedHamiltonian:
    """Truncated modified energy ``(h/2)(u^2 + v^2) - (h^2/2) u v`` with its
    linearization polynomial ``lambda^2 + h^2 (1 - h^2/4)``.

    The origin is elliptic for the truncation exactly when 0 < h < 2.
    """
    if h <= 0:
        raise ValueError("time-step must be positive")
    c0 = h * h * (1.0 - h * h / 4.0)
    return SEModifiedHamiltonian(
        quad=(0.5 * h, 0.5 * h, -0.5 * h * h),
        char_poly=(1.0, 0.0, c0),
        elliptic=bool(0.0 < h < 2.0),
    )


def se_time_dependent_hamiltonian(u: float, v: float, t: float) -> float:
    """Generating time-dependent energy of the symplectic Euler flow:
    ``u^2/2 + ((1 - 3 t^2)/2) v^2 - t u v``."""
    return 0.5 * u * u + 0.5 * (1.0 - 3.0 * t * t) * v * v - t * u * v


# ---------------------------------------------------------------------------
# Drift reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DriftStats:
    max_abs_dev: float
    slope: float
    slope_sigma: float
    n_used: int


def _fit_drift(col: np.ndarray) -> DriftStats:
    finite = np.isfinite(col)
    n = int(np.argmax(~finite)) if not finite.all() else col.size
    col = col[:n]
    dev = col - col[0]
    if n < 3:
        return DriftStats(float(np.max(np.abs(dev))) if n else np.nan, 0.0, 0.0, n)
    k = np.arange(n, dtype=float)
    coef = np.polyfit(k, dev, 1)
    resid = dev - np.polyval(coef, k)
    denom = np.sum((k - k.mean()) ** 2)
    sigma = float(np.sqrt(np.sum(resid**2) / (n - 2) / denom))
    return DriftStats(
        max_abs_dev=float(np.max(np.abs(dev))),
        slope=float(coef[0]),
        slope_sigma=sigma,
        n_used=n,
    )


def drift_report(traj: Trajectory) -> dict[str, DriftStats]:
    """Max deviation from step 0 and least-squares slope (with its standard
    error) per conservation diagnostic.

    Solver bookkeeping columns are skipped.  Non-finite tails (a blown-up
    contrast integrator) restrict the fit to the finite prefix.
    """
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    out: dict[str, DriftStats] = {}
    for name, col in traj.diagnostics.items():
        if name in ("stage_iters", "stage_residual"):
            continue
        out[name] = _fit_drift(np.asarray(col, dtype=float))
    return out
