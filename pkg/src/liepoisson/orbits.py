"""Coadjoint orbits, their tangent spaces, and the orbit two-form.

A state rho is moved by conjugation, rho -> g rho g^(-1); the directions
tangent to that motion are the commutators [x, rho], and on them the orbit
carries the two-form

    omega(rho)([x, rho], [y, rho]) = tr([x, y] rho).

The form does not depend on which x generates a given tangent vector
(``kks_welldefined_defect`` measures this), it is antisymmetric, and it is
weakly nondegenerate on the tangent space: its Gram matrix over a basis of
generators has exactly the rank of the tangent space itself
(``kks_form_rank`` versus ``characteristic_rank``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import as_matrix, commutator, elementary, trace_pairing

__all__ = [
    "OrbitPoint",
    "characteristic_rank",
    "coadjoint_act",
    "kks_eval",
    "kks_form_rank",
    "kks_welldefined_defect",
    "rank_one_state",
    "tangent_vector",
]

# conjugation by g loses roughly cond(g) worth of precision; past this we
# refuse rather than return garbage
COND_LIMIT = 1e12

_RANK_RTOL = 1e-10


@dataclass(frozen=True)
class OrbitPoint:
    """A base point on a coadjoint orbit."""

    rho: np.ndarray

    def __init__(self, rho):
        object.__setattr__(self, "rho", as_matrix(rho))

    @property
    def dim(self) -> int:
        return self.rho.shape[0]

    def tangent(self, x) -> np.ndarray:
        return tangent_vector(x, self.rho)

    def kks(self, x, y) -> complex:
        return kks_eval(self.rho, x, y)


def _state_of(point) -> np.ndarray:
    if isinstance(point, OrbitPoint):
        return point.rho
    return as_matrix(point)


def coadjoint_act(g, point) -> np.ndarray:
    """g rho g^(-1), refusing ill-conditioned g (cond > 1e12)."""
    g = as_matrix(g)
    rho = _state_of(point)
    cond = float(np.linalg.cond(g))
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise ValueError(f"conjugating element too ill-conditioned (cond={cond:.3g})")
    # X = g rho g^(-1) solved as g^T X^T = (g rho)^T, avoiding an explicit inverse
    return np.linalg.solve(g.T, (g @ rho).T).T


def tangent_vector(x, point) -> np.ndarray:
    """[x, rho]: the orbit direction generated by x at rho."""
    return commutator(as_matrix(x), _state_of(point))


def kks_eval(point, x, y) -> complex:
    """omega(rho)([x, rho], [y, rho]) = tr([x, y] rho)."""
    rho = _state_of(point)
    return trace_pairing(commutator(as_matrix(x), as_matrix(y)), rho)


def kks_welldefined_defect(point, x1, x2, y, tol: float = 1e-10) -> float:
    """|omega computed from generator x1 minus from x2| for one tangent vector.

    x1 and x2 must generate the same tangent vector at rho ([x1 - x2, rho] = 0
    to tol); anything else is a usage error, not a defect, and raises.
    """
    rho = _state_of(point)
    mismatch = float(np.max(np.abs(commutator(as_matrix(x1) - as_matrix(x2), rho))))
    if mismatch > tol:
        raise ValueError(
            f"generators disagree on the tangent vector (|[x1-x2, rho]| = {mismatch:.3g})")
    return abs(kks_eval(rho, x1, y) - kks_eval(rho, x2, y))


def _svd_rank(m: np.ndarray) -> int:
    s = np.linalg.svd(m, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > _RANK_RTOL * s[0]))


def characteristic_rank(point) -> int:
    """dim { [x, rho] : x arbitrary }, the orbit's tangent dimension at rho.

    Equals n^2 minus the dimension of the commutant of rho.  Computed as the
    SVD rank of x -> [x, rho] over the elementary-matrix basis, singular
    values cut at 1e-10 relative.
    """
    rho = _state_of(point)
    n = rho.shape[0]
    cols = np.empty((n * n, n * n), dtype=complex)
    for i in range(n):
        for j in range(n):
            cols[:, i * n + j] = commutator(elementary(n, i, j), rho).reshape(-1)
    return _svd_rank(cols)


def kks_form_rank(point) -> int:
    """Rank of the Gram matrix G[(ab),(cd)] = omega(rho)([E_ab,rho],[E_cd,rho]).

    The form is weakly nondegenerate on the tangent space precisely when this
    equals ``characteristic_rank``; the two are compared by the verification
    suite rather than assumed.
    """
    rho = _state_of(point)
    n = rho.shape[0]
    basis = [elementary(n, i, j) for i in range(n) for j in range(n)]
    gram = np.empty((n * n, n * n), dtype=complex)
    for a, xa in enumerate(basis):
        for b, xb in enumerate(basis):
            gram[a, b] = kks_eval(rho, xa, xb)
    return _svd_rank(gram)


def rank_one_state(v) -> np.ndarray:
    """The projector v v* / <v, v> onto the span of a nonzero vector."""
    v = np.asarray(v, dtype=complex).reshape(-1)
    norm2 = float(np.real(np.vdot(v, v)))
    if norm2 <= 0.0 or not np.isfinite(norm2):
        raise ValueError("rank-one state needs a nonzero finite vector")
    return np.outer(v, v.conj()) / norm2
