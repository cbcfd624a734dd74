"""Projection operators on states that induce brackets on their images.

Three families are provided, each a pair (R, R*) adjoint under the trace
pairing tr(R*(x) rho) = tr(x R(rho)):

* ``measurement`` -- R(rho) = sum_n p_n rho p_n over a decomposition of unity
  {p_n}; self-dual.  Kills off-block coherences.
* ``lower_triangularize`` -- R(rho) = sum_n p_n rho q_n with the running sums
  q_n = p_1 + ... + p_n of an ordered decomposition; the dual is
  R*(x) = sum_n q_n x p_n.  For the standard basis decomposition R is exactly
  the keep-lower-triangle projection.
* ``group_average`` -- R(rho) = (1/|G|) sum_U U rho U* over a finite group of
  unitaries; the dual averages with the conjugations reversed.  The image of
  R* is the commutant of the group.

All three satisfy the multiplicative closure law
R*(R*(x) R*(y)) = R*(x) R*(y), which is the condition for the image bracket
tr([R* dx, R* dy] mu) to satisfy the Jacobi identity; ``closure_defect``
measures it directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .operators import (
    DecompositionOfUnity,
    as_matrix,
    identity,
    matrix_from_json,
    matrix_to_json,
    operator_norm,
    trace_norm,
    validate_decomposition,
)

__all__ = [
    "ReductionOp",
    "apply",
    "apply_dual",
    "closure_defect",
    "contraction_check",
    "group_average",
    "lower_triangularize",
    "measurement",
    "positivity_check",
    "reduction_from_json",
    "reduction_to_json",
]

KINDS = ("measurement", "lower_triangularize", "group_average")


@dataclass(frozen=True)
class ReductionOp:
    """A validated projection R with its dual R*.

    ``operators`` holds the defining family: ordered projectors for the two
    decomposition kinds, group elements for the averaging kind.  Treat the
    stored arrays as read-only.
    """

    kind: str
    operators: tuple

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    def __len__(self) -> int:
        return len(self.operators)

    def __repr__(self) -> str:
        return f"ReductionOp({self.kind}, {len(self)} x {self.dim}d)"


def _coerce_projectors(projectors) -> tuple:
    if isinstance(projectors, DecompositionOfUnity):
        return projectors.projectors
    return tuple(as_matrix(p) for p in projectors)


def measurement(projectors, tol: float = 1e-10) -> ReductionOp:
    """Block-diagonal pinching over a decomposition of unity."""
    ps = _coerce_projectors(projectors)
    if not validate_decomposition(DecompositionOfUnity(ps), tol):
        raise ValueError("projectors do not form a decomposition of unity")
    return ReductionOp("measurement", ps)


def lower_triangularize(projectors, tol: float = 1e-10) -> ReductionOp:
    """Block lower-triangular truncation; the order of projectors matters."""
    ps = _coerce_projectors(projectors)
    if not validate_decomposition(DecompositionOfUnity(ps), tol):
        raise ValueError("projectors do not form a decomposition of unity")
    return ReductionOp("lower_triangularize", ps)


def group_average(unitaries: Sequence, tol: float = 1e-10) -> ReductionOp:
    """Averaging over a finite group of unitaries.

    The family must contain the identity, consist of unitaries, and be closed
    under multiplication (each product must match a listed element to tol);
    inverses then come for free in a finite set.
    """
    us = tuple(as_matrix(u) for u in unitaries)
    if not us:
        raise ValueError("group_average needs at least one unitary")
    n = us[0].shape[0]
    eye = identity(n)
    for u in us:
        if u.shape[0] != n:
            raise ValueError("group elements must share one dimension")
        if operator_norm(u @ u.conj().T - eye) > tol:
            raise ValueError("group element is not unitary")
    if not any(operator_norm(u - eye) <= tol for u in us):
        raise ValueError("group does not contain the identity")
    for u in us:
        for v in us:
            w = u @ v
            if not any(operator_norm(w - x) <= tol for x in us):
                raise ValueError("unitary family is not closed under products")
    return ReductionOp("group_average", us)


def _running_sums(ps: tuple) -> list:
    sums, acc = [], np.zeros_like(ps[0])
    for p in ps:
        acc = acc + p
        sums.append(acc)
    return sums


def apply(op: ReductionOp, rho) -> np.ndarray:
    """R(rho)."""
    rho = as_matrix(rho)
    if op.kind == "measurement":
        return sum(p @ rho @ p for p in op.operators)
    if op.kind == "lower_triangularize":
        qs = _running_sums(op.operators)
        return sum(p @ rho @ q for p, q in zip(op.operators, qs))
    if op.kind == "group_average":
        return sum(u @ rho @ u.conj().T for u in op.operators) / len(op)
    raise ValueError(f"unknown reduction kind {op.kind!r}")


def apply_dual(op: ReductionOp, x) -> np.ndarray:
    """R*(x), the trace-pairing adjoint of R."""
    x = as_matrix(x)
    if op.kind == "measurement":
        return sum(p @ x @ p for p in op.operators)
    if op.kind == "lower_triangularize":
        qs = _running_sums(op.operators)
        return sum(q @ x @ p for p, q in zip(op.operators, qs))
    if op.kind == "group_average":
        return sum(u.conj().T @ x @ u for u in op.operators) / len(op)
    raise ValueError(f"unknown reduction kind {op.kind!r}")


def closure_defect(op: ReductionOp, x, y) -> float:
    """||R*(R*(x) R*(y)) - R*(x) R*(y)|| in operator norm.

    Zero means the image of R* is closed under products, the hypothesis that
    makes the induced bracket on im R a Poisson bracket.
    """
    a = apply_dual(op, x) @ apply_dual(op, y)
    return operator_norm(apply_dual(op, a) - a)


def contraction_check(op: ReductionOp, rho, tol: float = 1e-10) -> bool:
    """Whether ||R(rho)||_1 <= ||rho||_1 (+ tol), as every R here satisfies."""
    return trace_norm(apply(op, rho)) <= trace_norm(rho) + tol


def positivity_check(op: ReductionOp, rho, tol: float = 1e-10) -> Optional[bool]:
    """Whether R preserves positive semidefiniteness at this rho.

    Returns None for lower_triangularize (its image leaves the Hermitian
    cone, so the question does not apply); otherwise rho must be PSD and the
    result says whether R(rho) is.
    """
    if op.kind == "lower_triangularize":
        return None
    rho = as_matrix(rho)
    if operator_norm(rho - rho.conj().T) > tol:
        raise ValueError("positivity check needs a Hermitian state")
    if float(np.linalg.eigvalsh(rho).min()) < -tol:
        raise ValueError("positivity check needs a PSD state")
    image = apply(op, rho)
    if operator_norm(image - image.conj().T) > tol:
        return False
    return float(np.linalg.eigvalsh(image).min()) >= -tol


def reduction_to_json(op: ReductionOp) -> dict:
    """Kind-discriminated JSON payload; exact float round trip."""
    key = "unitaries" if op.kind == "group_average" else "projectors"
    return {"kind": op.kind, key: [matrix_to_json(m) for m in op.operators]}


def reduction_from_json(payload: dict) -> ReductionOp:
    kind = payload.get("kind")
    if kind not in KINDS:
        raise ValueError(f"unknown reduction kind {kind!r}")
    key = "unitaries" if kind == "group_average" else "projectors"
    if key not in payload:
        raise ValueError(f"reduction payload missing {key!r}")
    mats = [matrix_from_json(m) for m in payload[key]]
    if kind == "measurement":
        return measurement(mats)
    if kind == "lower_triangularize":
        return lower_triangularize(mats)
    return group_average(mats)
