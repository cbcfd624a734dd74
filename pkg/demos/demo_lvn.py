"""Evolve a density matrix under a fixed Hamiltonian, two ways.

The same flow rho' = [-iH, rho] is integrated with plain RK4 and with the
spectrum-preserving conjugation scheme; the table compares how well each
holds the moments tr(rho^k) and the eigenvalues over a long run.
"""

import numpy as np

from liepoisson import integrators as it
from liepoisson import operators as op
from liepoisson.fixtures import seeded_random_state

N = 6
SEED = 2024
DT = 1e-3
STEPS = 2000


def moment(k):
    return lambda r: float(np.trace(np.linalg.matrix_power(r, k)).real)


def main():
    h0 = seeded_random_state(SEED, "hermitian", N)
    h0 = h0 / op.operator_norm(h0)
    rho0 = seeded_random_state(SEED + 1, "psd", N)
    monitors = {f"T{k}": moment(k) for k in range(1, 5)}

    cfg = it.IntegratorConfig(dt=DT, steps=STEPS, stride=100)
    rk4 = it.evolve(rho0, cfg, rhs=lambda t, y: op.commutator(-1j * h0, y),
                    monitors=monitors)

    iso_cfg = it.IntegratorConfig(dt=DT, steps=STEPS, stride=100,
                                  method="isospectral")
    iso = it.evolve(rho0, iso_cfg, hgrad=lambda r: -1j * h0,
                    monitors=monitors)

    print(f"LvN flow, N={N}, dt={DT}, t={DT * STEPS}")
    print()
    print("moment drift |T_k(t) - T_k(0)| over the run")
    print("  k      rk4          isospectral")
    for k in range(1, 5):
        d_rk4 = np.max(np.abs(rk4.monitors[f"T{k}"] - rk4.monitors[f"T{k}"][0]))
        d_iso = np.max(np.abs(iso.monitors[f"T{k}"] - iso.monitors[f"T{k}"][0]))
        print(f"  {k}      {d_rk4:.3e}    {d_iso:.3e}")
    print()
    print("eigenvalue drift (sorted spectra vs t=0)")
    print(f"  rk4          {it.spectral_drift(rk4):.3e}")
    print(f"  isospectral  {it.spectral_drift(iso):.3e}")
    print()
    print("the conjugation scheme keeps the spectrum to roundoff at any dt;")
    print("rk4 keeps it only to integration accuracy")


if __name__ == "__main__":
    main()
