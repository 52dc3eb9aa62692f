"""Lotka-Volterra systems on cluster Poisson structures.

The model is ``xdot_j = eps_j x_j + sum_k a_jk x_j x_k`` restricted to the
open positive quadrant.  When the interaction matrix is antisymmetric and a
strictly positive equilibrium ``q`` exists (``eps + A q = 0``), the system is
Hamiltonian for the bracket ``{x_i, x_j} = a_ij x_i x_j`` with energy
``H(x) = sum_j (x_j - q_j log x_j)``, and every kernel vector of ``A`` yields
a conserved monomial ``prod_k x_k^{v_k}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .errors import DomainError, NoPositiveFixedPoint, NotAntisymmetric

ANTISYMMETRY_TOL = 1e-12
KERNEL_TOL = 1e-12


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class LogLinear:
    """First integral of the form ``sum_j (linear_j x_j + log_j log x_j)``."""

    name: str
    linear: np.ndarray
    log: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "linear", _readonly(self.linear))
        object.__setattr__(self, "log", _readonly(self.log))

    def value(self, x: np.ndarray) -> float:
        return float(self.linear @ x + self.log @ np.log(x))


@dataclass(frozen=True)
class Monomial:
    """First integral ``prod_k x_k^{v_k}``, evaluated on log scale."""

    name: str
    exponents: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "exponents", _readonly(self.exponents))

    def value(self, x: np.ndarray) -> float:
        return float(np.exp(self.exponents @ np.log(x)))


FirstIntegral = LogLinear | Monomial


@dataclass(frozen=True)
class LVSystem:
    """Immutable Lotka-Volterra system with its solved equilibrium.

    Attributes
    ----------
    dim : int
        Number of species N.
    A : (N, N) ndarray
        Antisymmetric interaction matrix (stored exactly antisymmetric).
    eps : (N,) ndarray
        Environment parameters.
    q : (N,) ndarray
        Strictly positive equilibrium solving ``eps + A q = 0``.
    first_integrals : tuple
        Declared conserved quantities logged along trajectories.
    """

    dim: int
    A: np.ndarray
    eps: np.ndarray
    q: np.ndarray
    first_integrals: tuple[FirstIntegral, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "A", _readonly(self.A))
        object.__setattr__(self, "eps", _readonly(self.eps))
        object.__setattr__(self, "q", _readonly(self.q))


@dataclass(frozen=True)
class CasimirBasis:
    """Kernel basis of A; exponent vectors of the conserved monomials."""

    exponents: tuple[np.ndarray, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "exponents", tuple(_readonly(v) for v in self.exponents)
        )

    def __len__(self) -> int:
        return len(self.exponents)


def require_state(x, dim: int | None = None) -> np.ndarray:
    """Validate membership in the open positive quadrant."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise DomainError(f"state must be a vector, got shape {x.shape}")
    if dim is not None and x.shape[0] != dim:
        raise DomainError(f"state has dimension {x.shape[0]}, expected {dim}")
    if not np.all(np.isfinite(x)) or np.any(x <= 0.0):
        raise DomainError(f"state is not in the open positive quadrant: {x}")
    return x


def _kernel(A: np.ndarray, tol: float = KERNEL_TOL) -> np.ndarray:
    """Rows span ker A; singular values below tol * s_max count as zero."""
    _, s, Vt = np.linalg.svd(A)
    if s.size == 0 or s[0] == 0.0:
        return np.eye(A.shape[0])
    return Vt[s <= tol * s[0]]


def _positive_representative(q0: np.ndarray, K: np.ndarray) -> np.ndarray | None:
    """Shift q0 along span(K rows) to maximize the smallest component."""
    if K.shape[0] == 0:
        return q0 if np.all(q0 > 0.0) else None
    n, k = q0.shape[0], K.shape[0]
    # maximize t subject to q0 + K^T c >= t * 1; bound t to keep the LP finite
    c_obj = np.zeros(k + 1)
    c_obj[-1] = -1.0
    A_ub = np.hstack([-K.T, np.ones((n, 1))])
    res = linprog(
        c_obj,
        A_ub=A_ub,
        b_ub=q0,
        bounds=[(None, None)] * k + [(None, 1.0)],
        method="highs",
    )
    if not res.success:
        return None
    t, c = res.x[-1], res.x[:-1]
    if t <= 0.0:
        return None
    return q0 + K.T @ c


def build_system(
    A,
    eps,
    q_reference=None,
    first_integrals: tuple[FirstIntegral, ...] = (),
) -> LVSystem:
    """Construct an LVSystem, enforcing antisymmetry and solving for q.

    ``A q = -eps`` is solved by minimum-norm least squares.  When ``A`` is
    singular the solution is an affine family; an optional ``q_reference``
    selects the published representative, otherwise the representative
    maximizing the smallest component is used.

    Raises
    ------
    NotAntisymmetric
        If symmetrization ``(A - A^T)/2`` moves any entry by more than 1e-12.
    NoPositiveFixedPoint
        If no strictly positive equilibrium exists (the system is then not
        Hamiltonian for the cluster bracket).
    """
    A = np.asarray(A, dtype=float)
    eps = np.asarray(eps, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NotAntisymmetric(f"interaction matrix must be square, got {A.shape}")
    n = A.shape[0]
    if eps.shape != (n,):
        raise NotAntisymmetric(f"eps has shape {eps.shape}, expected ({n},)")

    A_skew = 0.5 * (A - A.T)
    if np.max(np.abs(A_skew - A)) > ANTISYMMETRY_TOL:
        raise NotAntisymmetric(
            "matrix is not antisymmetric: max |a_jk + a_kj| = "
            f"{np.max(np.abs(A + A.T)):.3e}"
        )

    q0, _, _, _ = np.linalg.lstsq(A_skew, -eps, rcond=None)
    if np.max(np.abs(A_skew @ q0 + eps)) > 1e-9 * max(1.0, float(np.max(np.abs(eps)))):
        raise NoPositiveFixedPoint(
            "fixed-point equations eps + A q = 0 are inconsistent"
        )

    K = _kernel(A_skew)
    if q_reference is not None:
        q_ref = np.asarray(q_reference, dtype=float)
        resid = np.max(np.abs(A_skew @ q_ref + eps))
        if resid > 1e-9:
            raise NoPositiveFixedPoint(
                f"q_reference does not solve the fixed-point equations (resid {resid:.3e})"
            )
        if np.any(q_ref <= 0.0):
            raise NoPositiveFixedPoint("q_reference is not strictly positive")
        q = q_ref
    else:
        q = _positive_representative(q0, K)
        if q is None or np.any(q <= 0.0):
            raise NoPositiveFixedPoint(
                "no strictly positive equilibrium in the solution family"
            )
    return LVSystem(dim=n, A=A_skew, eps=eps, q=q, first_integrals=tuple(first_integrals))


def hamiltonian(sys: LVSystem, x) -> float:
    """``H(x) = sum_j (x_j - q_j log x_j)``."""
    x = require_state(x, sys.dim)
    return float(np.sum(x - sys.q * np.log(x)))


def grad_hamiltonian(sys: LVSystem, x) -> np.ndarray:
    """Gradient ``1 - q_j / x_j`` componentwise."""
    x = require_state(x, sys.dim)
    return 1.0 - sys.q / x


def vector_field(sys: LVSystem, x) -> np.ndarray:
    """Right-hand side ``x_j (eps_j + (A x)_j)``."""
    x = require_state(x, sys.dim)
    return x * (sys.eps + sys.A @ x)


def bracket_vector_field(sys: LVSystem, x) -> np.ndarray:
    """Hamiltonian field from the bracket: ``{x_j, H} = x_j (A (x * gradH))_j``.

    Must agree with :func:`vector_field`; kept as an independent formula for
    cross-checking the Poisson structure.
    """
    x = require_state(x, sys.dim)
    return x * (sys.A @ (x * grad_hamiltonian(sys, x)))


def casimir_basis(sys: LVSystem, tol: float = KERNEL_TOL) -> CasimirBasis:
    """Basis of ker A, each vector scaled so its first nonzero entry is 1."""
    K = _kernel(sys.A, tol)
    vecs = []
    for v in K:
        scale = np.max(np.abs(v))
        idx = np.flatnonzero(np.abs(v) > 1e-9 * scale)
        vecs.append(v / v[idx[0]] if idx.size else v)
    return CasimirBasis(exponents=tuple(vecs))


def casimir_value(v, x) -> float:
    """``prod_k x_k^{v_k}`` computed as ``exp(sum v_k log x_k)``."""
    x = require_state(x)
    v = np.asarray(v, dtype=float)
    return float(np.exp(v @ np.log(x)))


# ---------------------------------------------------------------------------
# Bundled reference systems
# ---------------------------------------------------------------------------

def integrable_5d() -> LVSystem:
    """Completely integrable 5-species system, with invariants I1 and I2.

    Concatenation of a planar predator-prey pair with a one-prey/two-predator
    triple; equilibrium (1,1,1,1,1), one Casimir x4/x5, and H = I1 + I2.
    """
    A = np.array(
        [
            [0.0, 1.0, 0.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, -1.0, -1.0],
            [0.0, 0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0, 0.0],
        ]
    )
    eps = np.array([-1.0, 1.0, 2.0, -1.0, -1.0])
    ints = (
        LogLinear("I1", [1, 1, 0, 0, 0], [-1, -1, 0, 0, 0]),
        LogLinear("I2", [0, 0, 1, 1, 1], [0, 0, -1, -1, -1]),
    )
    return build_system(A, eps, q_reference=np.ones(5), first_integrals=ints)


def delta_system(delta: float) -> LVSystem:
    """Five-species family with perturbation ``delta`` in A and eps.

    Equilibrium (1-delta, 1, 1, 1, 1+delta); Casimir x1 x2 x5^delta / x3.
    At delta = 0 it splits into an integrable triple and an integrable pair.
    """
    d = float(delta)
    A = np.array(
        [
            [0.0, -1.0, -1.0, 0.0, 0.0],
            [1.0, 0.0, 1.0, d, 0.0],
            [1.0, -1.0, 0.0, 0.0, 0.0],
            [0.0, -d, 0.0, 0.0, 1.0],
            [0.0, 0.0, 0.0, -1.0, 0.0],
        ]
    )
    eps = np.array([2.0, -2.0, d, -1.0, 1.0])
    q_ref = np.array([1.0 - d, 1.0, 1.0, 1.0, 1.0 + d])
    return build_system(A, eps, q_reference=q_ref)


def predator_prey_2d() -> LVSystem:
    """Classic planar predator-prey pair with equilibrium (1, 1)."""
    A = np.array([[0.0, 1.0], [-1.0, 0.0]])
    eps = np.array([-1.0, 1.0])
    return build_system(A, eps)
