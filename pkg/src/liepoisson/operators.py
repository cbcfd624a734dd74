"""Dense complex-matrix kernel: pairing, norms, triangular and block splittings.

All state in this package is an N x N complex numpy array, interpreted as the
finite truncation of a trace-class operator (a "state" rho) or a bounded
operator (an "observable gradient" x).  The two spaces are paired by the
trace pairing <x, rho> = tr(x rho), which is what every adjoint in this
package is taken with respect to.

Matrices are plain ``numpy.ndarray`` values with dtype complex128; nothing here
mutates its inputs, so values can be shared freely between threads.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DEFAULT_TOL",
    "ClassTag",
    "DecompositionOfUnity",
    "as_matrix",
    "commutator",
    "elementary",
    "hermitian_part",
    "identity",
    "matrix_from_json",
    "matrix_to_json",
    "operator_norm",
    "project_lower",
    "project_strictly_lower",
    "project_strictly_upper",
    "project_upper_plus",
    "skew_hermitian_part",
    "spectral_projectors",
    "standard_basis_decomposition",
    "trace_norm",
    "trace_pairing",
    "validate",
    "validate_decomposition",
]

# Double-precision roundoff scale for exact algebraic identities.
DEFAULT_TOL = 1e-12


def as_matrix(m) -> np.ndarray:
    """Coerce to a square complex matrix and check entries are finite."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] < 1:
        raise ValueError("matrix dimension must be at least 1")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=complex)


def elementary(n: int, i: int, j: int) -> np.ndarray:
    """E_ij, zero-indexed: 1 in row i, column j."""
    if not (0 <= i < n and 0 <= j < n):
        raise ValueError(f"indices ({i}, {j}) out of range for dimension {n}")
    e = np.zeros((n, n), dtype=complex)
    e[i, j] = 1.0
    return e


def commutator(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """[x, y] = xy - yx."""
    x, y = as_matrix(x), as_matrix(y)
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
    return x @ y - y @ x


def trace_pairing(x: np.ndarray, rho: np.ndarray) -> complex:
    """<x, rho> = tr(x rho), the duality pairing of bounded against trace class."""
    x, rho = as_matrix(x), as_matrix(rho)
    if x.shape != rho.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {rho.shape}")
    # tr(x rho) = sum_ij x_ij rho_ji without forming the product.
    return complex(np.sum(x * rho.T))


def trace_norm(rho: np.ndarray) -> float:
    """Sum of singular values (descending SVD order for reproducibility)."""
    rho = as_matrix(rho)
    try:
        s = np.linalg.svd(rho, compute_uv=False)
    except np.linalg.LinAlgError as exc:  # report, never silently return
        raise ValueError(f"SVD did not converge on a {rho.shape[0]}x{rho.shape[0]} matrix") from exc
    return float(np.sum(s))


def operator_norm(m: np.ndarray) -> float:
    """Largest singular value."""
    return float(np.linalg.norm(as_matrix(m), 2))


def project_lower(rho: np.ndarray) -> np.ndarray:
    """Keep entries with row >= column (diagonal included)."""
    return np.tril(as_matrix(rho))


def project_strictly_upper(rho: np.ndarray) -> np.ndarray:
    """Keep entries with row < column; complement of project_lower."""
    return np.triu(as_matrix(rho), 1)


def project_upper_plus(x: np.ndarray) -> np.ndarray:
    """Keep entries with column >= row (diagonal included)."""
    return np.triu(as_matrix(x))


def project_strictly_lower(x: np.ndarray) -> np.ndarray:
    """Keep entries with column < row; complement of project_upper_plus."""
    return np.tril(as_matrix(x), -1)


def hermitian_part(m: np.ndarray) -> np.ndarray:
    m = as_matrix(m)
    return (m + m.conj().T) / 2.0


def skew_hermitian_part(m: np.ndarray) -> np.ndarray:
    """(m - m*) / 2, the projector onto the skew-Hermitian real subspace."""
    m = as_matrix(m)
    return (m - m.conj().T) / 2.0


class ClassTag(enum.Enum):
    """Validation labels for operator classes; storage is always dense.

    At finite truncation every class coincides as a set of matrices, so the
    tags only express which structural predicate a value is required to
    satisfy (triangularity, symmetry), not a different representation.
    """

    TRACE_CLASS = "trace_class"
    BOUNDED = "bounded"
    LOWER_TRIANGULAR = "lower_triangular"
    STRICTLY_UPPER = "strictly_upper"
    HERMITIAN = "hermitian"
    SKEW_HERMITIAN = "skew_hermitian"


def validate(tag: ClassTag, m: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """True iff the tag's defining predicate holds on m within tol."""
    m = as_matrix(m)
    if tag in (ClassTag.TRACE_CLASS, ClassTag.BOUNDED):
        return True  # finiteness already enforced by as_matrix
    if tag is ClassTag.LOWER_TRIANGULAR:
        return float(np.max(np.abs(np.triu(m, 1)), initial=0.0)) <= tol
    if tag is ClassTag.STRICTLY_UPPER:
        return float(np.max(np.abs(np.tril(m)), initial=0.0)) <= tol
    if tag is ClassTag.HERMITIAN:
        return float(np.max(np.abs(m - m.conj().T))) <= tol
    if tag is ClassTag.SKEW_HERMITIAN:
        return float(np.max(np.abs(m + m.conj().T))) <= tol
    raise ValueError(f"unknown tag {tag!r}")


@dataclass(frozen=True)
class DecompositionOfUnity:
    """Ordered mutually orthogonal self-adjoint projectors summing to identity."""

    projectors: tuple = field(default=())

    def __init__(self, projectors):
        object.__setattr__(self, "projectors", tuple(as_matrix(p) for p in projectors))
        if not self.projectors:
            raise ValueError("decomposition needs at least one projector")
        n = self.projectors[0].shape[0]
        if any(p.shape[0] != n for p in self.projectors):
            raise ValueError("all projectors must share one dimension")

    @property
    def dim(self) -> int:
        return self.projectors[0].shape[0]

    def __len__(self) -> int:
        return len(self.projectors)


def validate_decomposition(d: DecompositionOfUnity, tol: float = DEFAULT_TOL) -> bool:
    """Check P_n P_m = delta_nm P_n, sum P_n = I, and P_n* = P_n within tol."""
    ps = d.projectors
    n = d.dim
    if float(np.max(np.abs(sum(ps) - np.eye(n)))) > tol:
        return False
    for i, p in enumerate(ps):
        if float(np.max(np.abs(p - p.conj().T))) > tol:
            return False
        for j, q in enumerate(ps):
            want = p if i == j else 0.0
            if float(np.max(np.abs(p @ q - want))) > tol:
                return False
    return True


def standard_basis_decomposition(n: int) -> DecompositionOfUnity:
    """The rank-one decomposition {E_00, ..., E_(n-1)(n-1)}."""
    return DecompositionOfUnity([elementary(n, k, k) for k in range(n)])


def spectral_projectors(h: np.ndarray, tol: float = 1e-8) -> DecompositionOfUnity:
    """Decomposition of unity from the eigenspaces of a Hermitian matrix.

    Eigenvalues closer than tol are grouped into one block, so degenerate
    spectra produce higher-rank projectors.  Ordering follows the ascending
    eigenvalue order of ``numpy.linalg.eigh``.
    """
    h = as_matrix(h)
    if not validate(ClassTag.HERMITIAN, h, 1e-10):
        raise ValueError("spectral_projectors needs a Hermitian matrix")
    w, v = np.linalg.eigh(h)
    blocks = []
    start = 0
    for k in range(1, len(w) + 1):
        if k == len(w) or w[k] - w[start] > tol:
            vec = v[:, start:k]
            blocks.append(vec @ vec.conj().T)
            start = k
    return DecompositionOfUnity(blocks)


def matrix_to_json(m: np.ndarray) -> dict:
    """Serialize to {"dim", "re", "im"} with row-major entry lists.

    Values are plain Python floats, so a json round-trip is bit-exact
    (json uses shortest-repr float formatting).
    """
    m = as_matrix(m)
    return {
        "dim": int(m.shape[0]),
        "re": [float(x) for x in m.real.ravel()],
        "im": [float(x) for x in m.imag.ravel()],
    }


def matrix_from_json(payload: dict) -> np.ndarray:
    n = int(payload["dim"])
    re = np.asarray(payload["re"], dtype=float)
    im = np.asarray(payload["im"], dtype=float)
    if re.size != n * n or im.size != n * n:
        raise ValueError(f"matrix payload needs {n * n} entries per part")
    return as_matrix(re.reshape(n, n) + 1j * im.reshape(n, n))
