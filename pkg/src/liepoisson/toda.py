"""Weighted open Toda lattice: canonical form, Lax form, and their matching.

Canonical side.  The state is (x_1..x_{N-1}, p_1..p_N) with total momentum
zero, weights alpha_k and couplings lambda_k attached to the N-1 bonds, and

    H(x, p) = 1/2 sum_k p_k^2 + sum_k alpha_k lambda_k e^{x_k},
    xdot_k  = p_k - p_{k+1},
    pdot_k  = alpha_{k-1} lambda_{k-1} e^{x_{k-1}} - alpha_k lambda_k e^{x_k}

(with the out-of-range potential terms read as zero; total momentum is
conserved because the pdot telescope).

Lax side.  The map

    rho = diag(p) + sum_k lambda_k e^{x_k} E_{k+1,k},    a = sum_k alpha_k E_{k,k+1}

sends states to lower-triangular matrices; H becomes 1/2 tr((rho + a)^2), one
of the family h_k(rho) = tr((rho + a)^k) / k whose lower-coinduced flows are
the Lax fields pi_lower([rho, pi+ (rho + a)^{k-1}]).  The tangent map of the
canonical flow equals the k = 2 Lax field exactly (an algebraic identity, not
an approximation; ``intertwining_defect`` is roundoff), and the h_k mutually
Poisson-commute under the lower-coinduced bracket (``involution_defect``).

Positions above ~700 overflow exp; those evaluations raise NumericalAbort
rather than return inf.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .brackets import LOWER_COINDUCED, Observable, lp_bracket
from .integrators import NumericalAbort
from .operators import as_matrix, commutator, project_lower, project_upper_plus

__all__ = [
    "LaxPair",
    "TodaState",
    "canonical_field",
    "canonical_rhs",
    "default_weights",
    "flaschka",
    "flaschka_tangent",
    "intertwining_defect",
    "involution_defect",
    "lax_field",
    "lax_rhs",
    "pack",
    "toda_columns",
    "toda_from_json",
    "toda_hamiltonian",
    "toda_hk",
    "toda_to_json",
    "unpack",
]

X_OVERFLOW_LIMIT = 700.0  # np.exp overflows just above 709

MOMENTUM_TOL = 1e-12
# integration scrambles the telescoping cancellation slightly; unpack during
# a flow tolerates that much drift
MOMENTUM_TOL_LOOSE = 1e-9


def _as_float_vector(v, length: int, label: str) -> np.ndarray:
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.size != length:
        raise ValueError(f"{label} must have length {length}, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{label} must be finite")
    return v


@dataclass(frozen=True)
class TodaState:
    """Canonical data (x, p) plus bond weights (alpha, lam) for N sites."""

    x: np.ndarray
    p: np.ndarray
    alpha: np.ndarray
    lam: np.ndarray

    def __init__(self, x, p, alpha, lam, momentum_tol: float = MOMENTUM_TOL):
        p = np.asarray(p, dtype=float).reshape(-1)
        n = p.size
        if n < 2:
            raise ValueError("Toda lattice needs at least 2 sites")
        object.__setattr__(self, "p", _as_float_vector(p, n, "p"))
        object.__setattr__(self, "x", _as_float_vector(x, n - 1, "x"))
        object.__setattr__(self, "alpha", _as_float_vector(alpha, n - 1, "alpha"))
        object.__setattr__(self, "lam", _as_float_vector(lam, n - 1, "lam"))
        if abs(float(np.sum(self.p))) > momentum_tol:
            raise ValueError("total momentum must vanish")
        if np.any(self.lam == 0.0):
            raise ValueError("couplings lam must be nonzero")

    @property
    def n(self) -> int:
        return self.p.size


def default_weights(n: int):
    """(alpha, lam) with alpha_k = lam_k = 2^(-k), k = 0..n-2."""
    if n < 2:
        raise ValueError("Toda lattice needs at least 2 sites")
    w = 0.5 ** np.arange(n - 1, dtype=float)
    return w, w.copy()


def _bond_exponentials(x: np.ndarray) -> np.ndarray:
    if np.any(x > X_OVERFLOW_LIMIT):
        raise NumericalAbort("Toda position exceeds the exp overflow limit")
    return np.exp(x)


def toda_hamiltonian(state: TodaState) -> float:
    """H = 1/2 sum p_k^2 + sum alpha_k lam_k e^{x_k}."""
    pot = state.alpha * state.lam * _bond_exponentials(state.x)
    return float(0.5 * np.sum(state.p ** 2) + np.sum(pot))


def canonical_field(state: TodaState):
    """(xdot, pdot) of the canonical equations of motion."""
    c = state.alpha * state.lam * _bond_exponentials(state.x)  # bond forces
    xdot = state.p[:-1] - state.p[1:]
    pdot = np.empty_like(state.p)
    pdot[0] = -c[0]
    pdot[1:-1] = c[:-1] - c[1:]
    pdot[-1] = c[-1]
    return xdot, pdot


def pack(state: TodaState) -> np.ndarray:
    """Flatten to the vector (x, p) of length 2N - 1."""
    return np.concatenate([state.x, state.p])


def unpack(y, template: TodaState, momentum_tol: float = MOMENTUM_TOL_LOOSE) -> TodaState:
    """Rebuild a state from a packed vector, reusing the template's weights."""
    y = np.asarray(y, dtype=float).reshape(-1)
    n = template.n
    if y.size != 2 * n - 1:
        raise ValueError(f"packed vector must have length {2 * n - 1}")
    return TodaState(y[:n - 1], y[n - 1:], template.alpha, template.lam,
                     momentum_tol=momentum_tol)


def canonical_rhs(template: TodaState):
    """rhs(t, y) on packed vectors, suitable for the rk4 integrator."""
    alpha, lam, n = template.alpha, template.lam, template.n

    def rhs(t, y):
        x, p = y[:n - 1], y[n - 1:]
        c = alpha * lam * _bond_exponentials(x)
        xdot = p[:-1] - p[1:]
        pdot = np.empty_like(p)
        pdot[0] = -c[0]
        pdot[1:-1] = c[:-1] - c[1:]
        pdot[-1] = c[-1]
        return np.concatenate([xdot, pdot])

    return rhs


def toda_columns(n: int):
    """CSV column names for packed states: x_1..x_{N-1}, p_1..p_N."""
    return [f"x_{k}" for k in range(1, n)] + [f"p_{k}" for k in range(1, n + 1)]


@dataclass(frozen=True)
class LaxPair:
    """Lower-triangular state rho and the fixed strictly upper shift a."""

    rho: np.ndarray
    a: np.ndarray

    def __init__(self, rho, a):
        object.__setattr__(self, "rho", as_matrix(rho))
        object.__setattr__(self, "a", as_matrix(a))
        if self.rho.shape != self.a.shape:
            raise ValueError("rho and a must share one dimension")

    @property
    def lax(self) -> np.ndarray:
        """The full Lax matrix L = rho + a."""
        return self.rho + self.a


def flaschka(state: TodaState) -> LaxPair:
    """rho = diag(p) + sum lam_k e^{x_k} E_{k+1,k}, a = sum alpha_k E_{k,k+1}."""
    n = state.n
    b = state.lam * _bond_exponentials(state.x)
    rho = np.diag(state.p.astype(complex))
    a = np.zeros((n, n), dtype=complex)
    for k in range(n - 1):
        rho[k + 1, k] = b[k]
        a[k, k + 1] = state.alpha[k]
    return LaxPair(rho, a)


def flaschka_tangent(state: TodaState, xdot, pdot) -> np.ndarray:
    """Image of a canonical tangent (xdot, pdot) under the Flaschka map.

    d rho = diag(pdot) + sum lam_k e^{x_k} xdot_k E_{k+1,k}.
    """
    n = state.n
    xdot = _as_float_vector(xdot, n - 1, "xdot")
    pdot = _as_float_vector(pdot, n, "pdot")
    b = state.lam * _bond_exponentials(state.x)
    d = np.diag(pdot.astype(complex))
    for k in range(n - 1):
        d[k + 1, k] = b[k] * xdot[k]
    return d


def toda_hk(k: int, a) -> Observable:
    """h_k(rho) = tr((rho + a)^k) / k on lower-triangular states.

    Gradient representative: pi+ ((rho + a)^(k-1)).  h_2 is the image of the
    canonical Hamiltonian under the Flaschka map.
    """
    if k < 1:
        raise ValueError("index must be a positive integer")
    a = as_matrix(a)

    def evaluate(rho):
        lax = as_matrix(rho) + a
        return complex(np.trace(np.linalg.matrix_power(lax, k))) / k

    def gradient(rho):
        lax = as_matrix(rho) + a
        return project_upper_plus(np.linalg.matrix_power(lax, k - 1))

    return Observable(evaluate, gradient, domain="lower",
                      name=f"tr((rho+a)^{k})/{k}")


def lax_field(pair: LaxPair, k: int = 2) -> np.ndarray:
    """pi_lower([rho, pi+ (rho + a)^(k-1)]), the h_k flow of the pair."""
    m = project_upper_plus(np.linalg.matrix_power(pair.lax, k - 1))
    return project_lower(commutator(pair.rho, m))


def lax_rhs(a, k: int = 2):
    """rhs(t, rho) for integrating the Lax flow at fixed a."""
    a = as_matrix(a)

    def rhs(t, rho):
        return lax_field(LaxPair(rho, a), k)

    return rhs


def intertwining_defect(state: TodaState) -> float:
    """max-abs gap between the pushed canonical field and the Lax field.

    The two agree identically; values at roundoff scale certify that the
    Flaschka map sends the canonical flow to the k = 2 Lax flow.
    """
    xdot, pdot = canonical_field(state)
    pushed = flaschka_tangent(state, xdot, pdot)
    pair = flaschka(state)
    return float(np.max(np.abs(pushed - lax_field(pair, 2))))


def involution_defect(state: TodaState, j: int, k: int) -> float:
    """|{h_j, h_k}| under the lower-coinduced bracket at the Flaschka image."""
    pair = flaschka(state)
    hj = toda_hk(j, pair.a)
    hk = toda_hk(k, pair.a)
    return abs(lp_bracket(LOWER_COINDUCED, hj, hk, pair.rho))


def toda_to_json(state: TodaState) -> dict:
    return {
        "N": state.n,
        "x": [float(v) for v in state.x],
        "p": [float(v) for v in state.p],
        "alpha": [float(v) for v in state.alpha],
        "lambda": [float(v) for v in state.lam],
    }


def toda_from_json(payload: dict) -> TodaState:
    for key in ("N", "x", "p", "alpha", "lambda"):
        if key not in payload:
            raise ValueError(f"Toda payload missing {key!r}")
    n = int(payload["N"])
    state = TodaState(payload["x"], payload["p"], payload["alpha"], payload["lambda"])
    if state.n != n:
        raise ValueError("declared N disagrees with the p vector")
    return state
