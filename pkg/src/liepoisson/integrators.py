"""Time integration: fixed-step RK4 and an exactly isospectral conjugation step.

The isospectral step advances rho by similarity,

    rho' = Q rho Q^(-1),    Q = exp(dt * K(rho_mid)),

with rho_mid an explicit midpoint predictor.  Whatever the accuracy in time
(second order), the spectrum of rho is preserved to roundoff at every step,
because conjugation cannot move eigenvalues.  RK4 conserves spectra only to
O(dt^4) per unit time; the contrast between the two is itself a test target.

``evolve`` records every ``stride``-th state plus the final one, checks each
step for non-finite entries (raising ``NumericalAbort``), and evaluates any
requested scalar monitors along the way.  Trajectories serialize to CSV with
17 significant digits, enough to round-trip a double exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np
from scipy.linalg import expm

from .brackets import FULL, BracketSpec, MatrixLinearMap, Observable, ham_field
from .operators import as_matrix, commutator

__all__ = [
    "IntegratorConfig",
    "NumericalAbort",
    "Trajectory",
    "collective_defect",
    "evolve",
    "isospectral_step",
    "noether_drift",
    "rk4_step",
    "spectral_drift",
]

METHODS = ("rk4", "isospectral")


class NumericalAbort(RuntimeError):
    """The flow produced non-finite values; the run cannot continue."""


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float
    steps: int
    stride: int = 1
    method: str = "rk4"

    def __post_init__(self):
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise ValueError("dt must be positive and finite")
        if self.steps < 1:
            raise ValueError("steps must be at least 1")
        if self.stride < 1:
            raise ValueError("stride must be at least 1")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")


def rk4_step(rhs: Callable, t: float, y, dt: float):
    """One classical fourth-order Runge-Kutta step for y' = rhs(t, y)."""
    k1 = rhs(t, y)
    k2 = rhs(t + 0.5 * dt, y + 0.5 * dt * k1)
    k3 = rhs(t + 0.5 * dt, y + 0.5 * dt * k2)
    k4 = rhs(t + dt, y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def isospectral_step(hgrad: Callable, rho, dt: float):
    """One conjugation step rho -> Q rho Q^(-1), Q = exp(dt K(rho_mid)).

    ``hgrad`` maps a state to the commutator generator K with rho' = [K, rho].
    The midpoint state is predicted by an explicit Euler half step, making the
    scheme second order in dt while keeping the spectrum exactly.
    """
    rho = as_matrix(rho)
    rho_mid = rho + (0.5 * dt) * commutator(as_matrix(hgrad(rho)), rho)
    q = expm(dt * as_matrix(hgrad(rho_mid)))
    # q rho q^(-1) via a solve; q from a skew-Hermitian generator is unitary
    return np.linalg.solve(q.T, (q @ rho).T).T


def _default_flatten(state):
    if isinstance(state, np.ndarray) and state.ndim == 2:
        n = state.shape[0]
        cols = []
        for i in range(n):
            for j in range(n):
                cols.extend((f"re_{i}{j}", f"im_{i}{j}"))

        def row(s):
            out = np.empty(2 * n * n)
            flat = np.asarray(s, dtype=complex).reshape(-1)
            out[0::2] = flat.real
            out[1::2] = flat.imag
            return out

        return cols, row
    state = np.asarray(state)
    cols = [f"y{k}" for k in range(state.size)]
    return cols, lambda s: np.asarray(s, dtype=float).reshape(-1)


@dataclass
class Trajectory:
    """Recorded flow: times, raw states, flattened values, scalar monitors."""

    times: np.ndarray
    states: List
    columns: List[str]
    values: np.ndarray
    monitors: Dict[str, np.ndarray] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.times)

    def to_csv(self, path) -> None:
        """Write t,<state columns>,<monitors> rows at 17 significant digits."""
        header = ["t", *self.columns, *self.monitors.keys()]
        mon = [np.asarray(self.monitors[k], dtype=float) for k in self.monitors]
        with open(path, "w") as fh:
            fh.write(",".join(header) + "\n")
            for idx, t in enumerate(self.times):
                cells = [t, *self.values[idx]]
                cells.extend(m[idx] for m in mon)
                fh.write(",".join(f"{c:.17g}" for c in cells) + "\n")


def evolve(y0, cfg: IntegratorConfig, rhs: Optional[Callable] = None,
           hgrad: Optional[Callable] = None,
           monitors: Optional[Dict[str, Callable]] = None,
           flatten=None) -> Trajectory:
    """Integrate from y0 and record every cfg.stride-th state plus the last.

    method "rk4" needs ``rhs(t, y)``; "isospectral" needs ``hgrad(rho)`` (the
    commutator generator) and a matrix state.  ``monitors`` maps names to
    scalar functions of the state, evaluated at recorded times.  Non-finite
    values abort the run with ``NumericalAbort``.
    """
    if cfg.method == "rk4":
        if rhs is None:
            raise ValueError("rk4 integration needs rhs(t, y)")
    elif hgrad is None:
        raise ValueError("isospectral integration needs hgrad(rho)")

    y = np.array(y0)
    monitors = monitors or {}
    columns, row_of = flatten if flatten is not None else _default_flatten(y)

    times, states = [], []
    mon_values: Dict[str, list] = {name: [] for name in monitors}

    def record(t, state):
        times.append(t)
        states.append(state)
        for name, fn in monitors.items():
            mon_values[name].append(float(np.real(fn(state))))

    record(0.0, y)
    for k in range(1, cfg.steps + 1):
        t_prev = (k - 1) * cfg.dt
        if cfg.method == "rk4":
            y = rk4_step(rhs, t_prev, y, cfg.dt)
        else:
            y = isospectral_step(hgrad, y, cfg.dt)
        if not np.all(np.isfinite(y)):
            raise NumericalAbort(f"non-finite state after step {k}")
        if k % cfg.stride == 0 or k == cfg.steps:
            record(k * cfg.dt, y)

    rows = np.array([row_of(s) for s in states], dtype=float)
    return Trajectory(
        times=np.array(times), states=states, columns=list(columns), values=rows,
        monitors={k: np.array(v) for k, v in mon_values.items()},
    )


def noether_drift(obs: Observable, traj: Trajectory) -> float:
    """max_t |obs(state_t) - obs(state_0)| over the recorded states."""
    vals = np.array([complex(obs(s)) for s in traj.states])
    return float(np.max(np.abs(vals - vals[0])))


def _sorted_spectrum(rho) -> np.ndarray:
    ev = np.linalg.eigvals(as_matrix(rho))
    order = np.lexsort((ev.imag, ev.real))
    return ev[order]


def spectral_drift(traj: Trajectory) -> float:
    """max_t max_k |lambda_k(state_t) - lambda_k(state_0)|, eigenvalues sorted.

    Sorting pairs eigenvalues greedily; adequate for the well-separated
    spectra used in tests, where it measures isospectrality of the flow.
    """
    ref = _sorted_spectrum(traj.states[0])
    worst = 0.0
    for s in traj.states[1:]:
        worst = max(worst, float(np.max(np.abs(_sorted_spectrum(s) - ref))))
    return worst


def collective_defect(jmap: MatrixLinearMap, h_down: Observable,
                      down_spec: BracketSpec, rho0, cfg: IntegratorConfig) -> float:
    """How far J fails to carry the lifted flow onto the reduced flow.

    Upstairs, the composite h_down o J generates a full-bracket flow from
    rho0 via the chain-rule gradient J*(Dh(J rho)).  Downstairs, h_down
    generates its own flow from J(rho0) under ``down_spec``.  The defect is
    the worst max-abs difference between J(upstairs state) and the downstairs
    state over the recorded times.  When J intertwines the two field
    conventions this is pure integration error, shrinking as O(dt^4).
    """
    rho0 = as_matrix(rho0)

    h_up = Observable(
        lambda rho: h_down(jmap.apply(rho)),
        lambda rho: jmap.adjoint(h_down.grad(jmap.apply(rho))),
        linear=h_down.linear, name=f"{h_down.name} o {jmap.name}",
    )
    up = evolve(rho0, cfg, rhs=lambda t, y: ham_field(FULL, h_up, y))
    down = evolve(jmap.apply(rho0), cfg,
                  rhs=lambda t, y: ham_field(down_spec, h_down, y))

    worst = 0.0
    for s_up, s_down in zip(up.states, down.states):
        worst = max(worst, float(np.max(np.abs(jmap.apply(s_up) - s_down))))
    return worst
