"""Lie-Poisson brackets, Hamiltonian fields, Casimirs, and defect calculators.

Four bracket variants are supported, selected by a ``BracketSpec``:

* ``FULL`` -- {f,g}(rho) = tr([Df(rho), Dg(rho)] rho) on all matrices.
* ``LOWER_COINDUCED`` -- tr([pi+ Df, pi+ Dg] rho) on lower-triangular states,
  where pi+ keeps the upper-plus (column >= row) part of a gradient.  Gradient
  representatives live in the upper-plus algebra; a full-matrix gradient is
  projected before use, which is harmless because the pairing against a
  lower-triangular state cannot see the strictly lower part.
* ``HERMITIAN_REAL`` -- Re tr([df, dg] rho) on skew-Hermitian states, with
  gradients projected to their skew-Hermitian part (the representative of a
  real-linear functional under the real pairing Re tr).
* ``product(left, right)`` -- states are pairs, gradients are pairs, and the
  bracket is the sum of the partial brackets.

Sign conventions (fixed, and asserted by tests):

* FULL Hamiltonian field: X_h(rho) = [Dh(rho), rho], so that
  <Dg, X_h> = {g, h}.
* LOWER_COINDUCED Hamiltonian field: X_h(rho) = pi_lower([rho, pi+ Dh(rho)]),
  the opposite composite order.  This is the orientation for which the
  Flaschka image of the canonical Toda flow equals the Lax flow exactly
  (see the toda module); the price is a flipped pairing identity
  <Dg, X_h> = {h, g} on this bracket.

A zero state gives bracket value 0 for every variant (the structures are
linear in the state); that case is ordinary, not an error.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .operators import (
    DEFAULT_TOL,
    ClassTag,
    as_matrix,
    commutator,
    elementary,
    project_lower,
    project_upper_plus,
    skew_hermitian_part,
    trace_pairing,
    validate,
)

__all__ = [
    "FULL",
    "HERMITIAN_REAL",
    "LOWER_COINDUCED",
    "BracketSpec",
    "MatrixLinearMap",
    "Observable",
    "bracket_observable",
    "casimir",
    "fd_gradient",
    "fd_gradient_lower",
    "fd_gradient_skew",
    "ham_field",
    "inclusion_lower_map",
    "jacobi_defect",
    "leibniz_defect",
    "lower_projection_map",
    "lp_bracket",
    "pair_inclusion_map",
    "poisson_map_defect",
    "product",
    "product_observable",
    "reduction_condition_defect",
]

# Central-difference steps: first derivatives, and gradients of quantities
# that are themselves bracket evaluations (one differentiation deep already).
FD_STEP = 1e-5
FD_STEP_NESTED = 1e-4


@dataclass(frozen=True)
class BracketSpec:
    """Which Poisson structure is in force.

    kind is one of "full", "lower_coinduced", "hermitian_real", "product";
    for "product" the two factor specs are carried along.
    """

    kind: str
    left: Optional["BracketSpec"] = None
    right: Optional["BracketSpec"] = None

    def __repr__(self) -> str:
        if self.kind == "product":
            return f"product({self.left!r}, {self.right!r})"
        return self.kind


FULL = BracketSpec("full")
LOWER_COINDUCED = BracketSpec("lower_coinduced")
HERMITIAN_REAL = BracketSpec("hermitian_real")


def product(left: BracketSpec, right: BracketSpec) -> BracketSpec:
    return BracketSpec("product", left, right)


def _domain_for(spec: BracketSpec) -> str:
    return {
        "full": "full",
        "lower_coinduced": "lower",
        "hermitian_real": "skew",
        "product": "full",
    }[spec.kind]


def fd_gradient(func: Callable, rho, step: float = FD_STEP):
    """Central-difference gradient representative under the trace pairing.

    Differentiates entry by entry against the real and imaginary parts of the
    state and assembles G with G[m, n] = d f / d rho_nm (so that
    df . delta = tr(G delta) for the polynomial observables used here).
    Pair states are handled componentwise.
    """
    if isinstance(rho, tuple):
        grads = []
        for k in range(len(rho)):
            def fk(m, k=k):
                parts = list(rho)
                parts[k] = m
                return func(tuple(parts))

            grads.append(fd_gradient(fk, rho[k], step))
        return tuple(grads)

    rho = as_matrix(rho)
    n = rho.shape[0]
    g = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            e = np.zeros((n, n), dtype=complex)
            e[i, j] = step
            d_re = (func(rho + e) - func(rho - e)) / (2.0 * step)
            d_im = (func(rho + 1j * e) - func(rho - 1j * e)) / (2.0 * step)
            # Wirtinger derivative; equals the complex derivative for
            # holomorphic (polynomial-in-entries) observables.
            g[j, i] = 0.5 * (d_re - 1j * d_im)
    return g


def fd_gradient_lower(func: Callable, rho, step: float = FD_STEP):
    """Gradient of a function defined on lower-triangular states.

    Only directions inside the state space (row >= column) are probed, so the
    result is the canonical upper-plus representative: tr(G delta) = df . delta
    for every lower-triangular delta.
    """
    rho = as_matrix(rho)
    n = rho.shape[0]
    g = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(i + 1):
            e = np.zeros((n, n), dtype=complex)
            e[i, j] = step
            d_re = (func(rho + e) - func(rho - e)) / (2.0 * step)
            d_im = (func(rho + 1j * e) - func(rho - 1j * e)) / (2.0 * step)
            g[j, i] = 0.5 * (d_re - 1j * d_im)
    return g


def fd_gradient_skew(func: Callable, rho, step: float = FD_STEP):
    """Real gradient on the skew-Hermitian subspace: df . delta = Re tr(G delta).

    Walks a real orthogonal basis of the skew-Hermitian matrices.  Under the
    pairing Re tr(XY) that basis has norm -1, hence the sign below.
    """
    rho = as_matrix(rho)
    n = rho.shape[0]
    basis = [1j * elementary(n, k, k) for k in range(n)]
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    for i in range(n):
        for j in range(i + 1, n):
            basis.append((elementary(n, i, j) - elementary(n, j, i)) * inv_sqrt2)
            basis.append(1j * (elementary(n, i, j) + elementary(n, j, i)) * inv_sqrt2)
    g = np.zeros((n, n), dtype=complex)
    for b in basis:
        slope = (func(rho + step * b) - func(rho - step * b)) / (2.0 * step)
        g -= float(np.real(slope)) * b
    return g


_FD_BY_DOMAIN = {
    "full": fd_gradient,
    "lower": fd_gradient_lower,
    "skew": fd_gradient_skew,
}


class Observable:
    """Scalar function of a state with a gradient representative.

    The gradient is the matrix G with df(rho).delta = tr(G delta) (for the
    product bracket, a pair of such matrices).  Passing gradient=None selects
    central finite differences with the given step; ``domain`` then decides
    which directions are probed ("full", "lower", or "skew").  ``linear``
    marks constant gradients, which lets bracket-of-bracket constructions
    stay exact.
    """

    def __init__(self, evaluate, gradient=None, *, linear=False,
                 fd_step=FD_STEP, domain="full", name=""):
        if domain not in _FD_BY_DOMAIN:
            raise ValueError(f"unknown gradient domain {domain!r}")
        self._eval = evaluate
        self._grad = gradient
        self.linear = bool(linear)
        self.fd_step = float(fd_step)
        self.domain = domain
        self.name = name

    def __call__(self, rho):
        return self._eval(rho)

    def grad(self, rho):
        if self._grad is not None:
            return self._grad(rho)
        return _FD_BY_DOMAIN[self.domain](self._eval, rho, self.fd_step)

    def __repr__(self) -> str:
        mode = "analytic" if self._grad is not None else f"fd(h={self.fd_step:g})"
        return f"Observable({self.name or '<anon>'}, {mode})"

    @classmethod
    def linear_form(cls, a, name="") -> "Observable":
        """f(rho) = tr(a rho) with constant gradient a."""
        a = as_matrix(a)
        return cls(lambda rho: trace_pairing(a, rho), lambda rho: a,
                   linear=True, name=name or "tr(a rho)")

    @classmethod
    def quadratic_form(cls, a, b, name="") -> "Observable":
        """f(rho) = tr(a rho b rho) with gradient b rho a + a rho b."""
        a, b = as_matrix(a), as_matrix(b)
        return cls(
            lambda rho: complex(np.trace(a @ rho @ b @ rho)),
            lambda rho: b @ rho @ a + a @ rho @ b,
            name=name or "tr(a rho b rho)",
        )

    @classmethod
    def real_linear_form(cls, a, name="") -> "Observable":
        """f(rho) = Re tr(a rho) with constant skew-sense gradient.

        For skew-Hermitian a the matrix a is already its own representative
        under Re tr restricted to skew-Hermitian states; general a is
        projected first.
        """
        a = skew_hermitian_part(as_matrix(a))
        return cls(lambda rho: float(trace_pairing(a, rho).real),
                   lambda rho: a, linear=True, domain="skew",
                   name=name or "Re tr(a rho)")

    @classmethod
    def pair_linear(cls, a1, a2, name="") -> "Observable":
        """f(r1, r2) = tr(a1 r1) + tr(a2 r2) on product states."""
        a1, a2 = as_matrix(a1), as_matrix(a2)
        return cls(
            lambda rr: trace_pairing(a1, rr[0]) + trace_pairing(a2, rr[1]),
            lambda rr: (a1, a2),
            linear=True, name=name or "pair linear",
        )


def _check_state(spec: BracketSpec, state, tol: float) -> None:
    if spec.kind == "product":
        if not (isinstance(state, tuple) and len(state) == 2):
            raise ValueError("product bracket expects a pair state")
        _check_state(spec.left, state[0], tol)
        _check_state(spec.right, state[1], tol)
        return
    if spec.kind == "lower_coinduced":
        if not validate(ClassTag.LOWER_TRIANGULAR, state, tol):
            raise ValueError("lower_coinduced bracket needs a lower-triangular state")
    elif spec.kind == "hermitian_real":
        if not validate(ClassTag.SKEW_HERMITIAN, state, tol):
            raise ValueError("hermitian_real bracket needs a skew-Hermitian state")
    elif spec.kind != "full":
        raise ValueError(f"unknown bracket spec {spec!r}")


def _canonical_grad(spec: BracketSpec, g):
    """Project a gradient onto the representative subspace of the spec."""
    if spec.kind == "lower_coinduced":
        return project_upper_plus(g)
    if spec.kind == "hermitian_real":
        return skew_hermitian_part(g)
    return as_matrix(g)


def _partial_bracket(spec: BracketSpec, df, dg, rho):
    df = _canonical_grad(spec, df)
    dg = _canonical_grad(spec, dg)
    value = trace_pairing(commutator(df, dg), rho)
    if spec.kind == "hermitian_real":
        return float(value.real)
    return value


def lp_bracket(spec: BracketSpec, f: Observable, g: Observable, state,
               tol: float = DEFAULT_TOL):
    """Evaluate the Lie-Poisson bracket {f, g} at the given state.

    Returns a complex number for full/lower_coinduced/product and a float for
    hermitian_real (a bracket of real functions on a real subspace).
    """
    _check_state(spec, state, tol)
    if spec.kind == "product":
        gf1, gf2 = f.grad(state)
        gg1, gg2 = g.grad(state)
        return (_partial_bracket(spec.left, gf1, gg1, state[0])
                + _partial_bracket(spec.right, gf2, gg2, state[1]))
    return _partial_bracket(spec, f.grad(state), g.grad(state), state)


def _partial_field(spec: BracketSpec, dh, rho):
    dh = _canonical_grad(spec, dh)
    if spec.kind == "lower_coinduced":
        # opposite composite order; see module docstring
        return project_lower(commutator(as_matrix(rho), dh))
    return commutator(dh, as_matrix(rho))


def ham_field(spec: BracketSpec, h: Observable, state, tol: float = DEFAULT_TOL):
    """Hamiltonian vector field of h at the state, per the fixed conventions."""
    _check_state(spec, state, tol)
    if spec.kind == "product":
        gh1, gh2 = h.grad(state)
        return (
            _partial_field(spec.left, gh1, state[0]),
            _partial_field(spec.right, gh2, state[1]),
        )
    return _partial_field(spec, h.grad(state), state)


def casimir(k: int) -> Observable:
    """T_k(rho) = tr(rho^k) / k, with analytic gradient rho^(k-1).

    Casimir of the full bracket: its Hamiltonian field [rho^(k-1), rho]
    vanishes identically.
    """
    if k < 1:
        raise ValueError("casimir index must be a positive integer")

    def evaluate(rho):
        rho = as_matrix(rho)
        return complex(np.trace(np.linalg.matrix_power(rho, k))) / k

    def gradient(rho):
        rho = as_matrix(rho)
        return np.linalg.matrix_power(rho, k - 1)

    return Observable(evaluate, gradient, linear=(k == 1), name=f"tr(rho^{k})/{k}")


def bracket_observable(spec: BracketSpec, f: Observable, g: Observable,
                       fd_step: float = FD_STEP_NESTED) -> Observable:
    """The function rho -> {f, g}(rho) as an Observable.

    When both arguments are linear the bracket is again linear with the exact
    gradient [df, dg] of projected representatives; otherwise the gradient
    falls back to central differences (with the nested step) over directions
    that stay inside the spec's state space.
    """
    name = f"{{{f.name},{g.name}}}"
    if f.linear and g.linear:
        if spec.kind == "product":
            def gradient_pair(rr):
                df1, df2 = f.grad(rr)
                dg1, dg2 = g.grad(rr)
                return (
                    commutator(_canonical_grad(spec.left, df1),
                               _canonical_grad(spec.left, dg1)),
                    commutator(_canonical_grad(spec.right, df2),
                               _canonical_grad(spec.right, dg2)),
                )

            return Observable(lambda rr: lp_bracket(spec, f, g, rr),
                              gradient_pair, linear=True, name=name)

        def gradient(rho):
            return commutator(_canonical_grad(spec, f.grad(rho)),
                              _canonical_grad(spec, g.grad(rho)))

        return Observable(lambda rho: lp_bracket(spec, f, g, rho),
                          gradient, linear=True, name=name)
    return Observable(lambda rho: lp_bracket(spec, f, g, rho),
                      None, fd_step=fd_step, domain=_domain_for(spec), name=name)


def jacobi_defect(spec: BracketSpec, f: Observable, g: Observable, h: Observable,
                  state, fd_step: float = FD_STEP_NESTED) -> float:
    """|{{f,g},h} + {{g,h},f} + {{h,f},g}| at the state."""
    total = 0.0 + 0.0j
    for a, b, c in ((f, g, h), (g, h, f), (h, f, g)):
        inner = bracket_observable(spec, a, b, fd_step)
        total += lp_bracket(spec, inner, c, state)
    return abs(total)


def product_observable(f: Observable, g: Observable) -> Observable:
    """Pointwise product f*g with gradient f(rho) Dg(rho) + g(rho) Df(rho)."""
    def gradient(rho):
        fg, gg = f.grad(rho), g.grad(rho)
        if isinstance(fg, tuple):
            fv, gv = f(rho), g(rho)
            return tuple(fv * b + gv * a for a, b in zip(fg, gg))
        return f(rho) * gg + g(rho) * fg

    return Observable(lambda rho: f(rho) * g(rho), gradient,
                      name=f"({f.name})*({g.name})")


def leibniz_defect(spec: BracketSpec, f: Observable, g: Observable, h: Observable,
                   state) -> float:
    """|{f g, h} - f {g, h} - g {f, h}| at the state."""
    fg = product_observable(f, g)
    lhs = lp_bracket(spec, fg, h, state)
    rhs = (f(state) * lp_bracket(spec, g, h, state)
           + g(state) * lp_bracket(spec, f, h, state))
    return abs(lhs - rhs)


class MatrixLinearMap:
    """A linear map between matrix state spaces with its trace-pairing adjoint.

    ``apply`` sends states forward; ``adjoint`` pulls gradient representatives
    back (the chain rule for f o phi reads D(f o phi)(rho) = phi*(Df(phi rho))).
    """

    def __init__(self, apply: Callable, adjoint: Callable, name: str = ""):
        self.apply = apply
        self.adjoint = adjoint
        self.name = name

    def __repr__(self) -> str:
        return f"MatrixLinearMap({self.name or '<anon>'})"


def lower_projection_map() -> MatrixLinearMap:
    """pi_lower as a map from the full space onto lower-triangular states.

    Its trace-pairing adjoint is pi_upper_plus acting on gradient
    representatives.  This map intertwines the full bracket upstairs with the
    coinduced bracket downstairs.
    """
    return MatrixLinearMap(project_lower, project_upper_plus, "pi_lower")


def inclusion_lower_map() -> MatrixLinearMap:
    """The inclusion of lower-triangular states into the full space.

    Not a Poisson map in general: the full bracket sees strictly lower
    gradient content that the coinduced bracket discards.  Used as the
    negative control.
    """
    return MatrixLinearMap(lambda rho: as_matrix(rho), project_upper_plus,
                           "lower inclusion")


def pair_inclusion_map(slot: int, zero_dim: int) -> MatrixLinearMap:
    """b -> (b, 0) or b -> (0, b) into a product state space.

    The missing component is the zero matrix of the given dimension; the
    adjoint keeps the occupied slot of a pair gradient.
    """
    if slot not in (0, 1):
        raise ValueError("slot must be 0 or 1")
    z = np.zeros((zero_dim, zero_dim), dtype=complex)

    def apply(b):
        b = as_matrix(b)
        return (b, z) if slot == 0 else (z, b)

    return MatrixLinearMap(apply, lambda gg: as_matrix(gg[slot]),
                           f"pair inclusion slot {slot}")


def poisson_map_defect(phi: MatrixLinearMap, src: BracketSpec, dst: BracketSpec,
                       f: Observable, g: Observable, state) -> float:
    """|{f o phi, g o phi}_src(state) - {f, g}_dst(phi(state))|.

    Zero (to roundoff) exactly when phi respects the two structures at the
    given state; f and g are observables on the destination space.
    """
    image = phi.apply(state)
    f_up = Observable(lambda s: f(phi.apply(s)),
                      lambda s: phi.adjoint(f.grad(phi.apply(s))),
                      linear=f.linear, name=f"{f.name} o {phi.name}")
    g_up = Observable(lambda s: g(phi.apply(s)),
                      lambda s: phi.adjoint(g.grad(phi.apply(s))),
                      linear=g.linear, name=f"{g.name} o {phi.name}")
    upstairs = lp_bracket(src, f_up, g_up, state)
    downstairs = lp_bracket(dst, f, g, image)
    return abs(upstairs - downstairs)


def reduction_condition_defect(apply_map: Callable, dual_map: Callable,
                               fbar: Observable, gbar: Observable, rho,
                               realified: bool = False) -> float:
    """Defect of the bracket-compatibility condition for a projection R.

    Functions on the reduced space extend to the ambient space as f = fbar o R
    with gradient R*(Dfbar(R rho)).  The defect compares the ambient bracket
    of two such extensions at rho against the reduced bracket of fbar, gbar at
    R(rho); both sides pair the same commutator of lifted gradients, one
    against rho and one against R(rho).  ``realified`` selects the real
    pairing Re tr with skew-Hermitian lifted gradients, the correct reading
    for real-linear projections such as the skew-Hermitian part.
    """
    rho = as_matrix(rho)
    image = apply_map(rho)
    if float(np.max(np.abs(apply_map(image) - image))) > 1e-10:
        raise ValueError("reduction map is not idempotent")
    a = dual_map(fbar.grad(image))
    b = dual_map(gbar.grad(image))
    if realified:
        a, b = skew_hermitian_part(a), skew_hermitian_part(b)
    c = commutator(a, b)
    upstairs = trace_pairing(c, rho)
    downstairs = trace_pairing(c, image)
    if realified:
        return abs(upstairs.real - downstairs.real)
    return abs(upstairs - downstairs)
