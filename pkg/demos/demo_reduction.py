"""The three reduction maps side by side on one density matrix.

Shows the image of each map, the laws they share (idempotence, commutator
closure of the dual image, the bracket-compatibility condition), and the one
law they do not: pinching and group averaging contract the trace norm, while
triangular truncation can expand it -- visibly, below, on a plain density
matrix.
"""

import numpy as np

from liepoisson import brackets as bk
from liepoisson import operators as op
from liepoisson import reduction as red
from liepoisson.fixtures import seeded_random_state

N = 4
SEED = 2024


def show(label, m):
    print(label)
    for row in np.asarray(m):
        print("   " + "  ".join(f"{v.real:+.3f}{v.imag:+.3f}j" for v in row))


def main():
    rho = seeded_random_state(SEED, "psd", N)
    basis = op.standard_basis_decomposition(N)
    signs = np.diag([(-1.0) ** k for k in range(N)]).astype(complex)
    ops = {
        "measurement (pinching)": red.measurement(basis),
        "triangular truncation": red.lower_triangularize(basis),
        "group average (sign flips)": red.group_average(
            [np.eye(N, dtype=complex), signs]),
    }

    show("state rho (density matrix, trace 1):", rho)
    print()

    x = seeded_random_state(SEED + 1, "general", N)
    y = seeded_random_state(SEED + 2, "general", N)
    for label, rop in ops.items():
        image = red.apply(rop, rho)
        print(f"== {label}")
        show("R(rho):", image)
        idem = np.max(np.abs(red.apply(rop, image) - image))
        cond = bk.reduction_condition_defect(
            lambda m: red.apply(rop, m), lambda m: red.apply_dual(rop, m),
            bk.Observable.linear_form(x), bk.Observable.linear_form(y), rho)
        print(f"   idempotence defect      {idem:.3e}")
        print(f"   dual closure defect     {red.closure_defect(rop, x, y):.3e}")
        print(f"   bracket condition       {cond:.3e}")
        before, after = op.trace_norm(rho), op.trace_norm(image)
        verdict = "contracts" if after <= before + 1e-12 else "EXPANDS"
        print(f"   trace norm              {before:.6f} -> {after:.6f}  "
              f"({verdict})")
        print()

    print("the expansion above is not a bug: triangular truncation is")
    print("unbounded in trace norm, and on density-like states it expands")
    print("essentially always; the other two maps are norm-one projections")


if __name__ == "__main__":
    main()
