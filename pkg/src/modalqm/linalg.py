"""Small dense complex linear algebra.

Matrices are plain ``numpy`` complex128 arrays.  The hermitian eigensolver
is a cyclic complex Jacobi method, which is accurate to a few ulps at the
sizes used here (N <= 64) and needs nothing beyond numpy.
"""

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import (
    DimensionMismatch,
    NonFinite,
    NotHermitian,
    NotSquare,
    RankDeficient,
)

HERMITIAN_TOL = 1e-10
JACOBI_TOL = 1e-13
RANK_TOL = 1e-12
# relative modulus gap below which two components count as tied
PHASE_TIE_TOL = 1e-12


def as_matrix(A, name="matrix"):
    """Validate and convert to a finite 2-D complex128 array."""
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NonFinite(f"{name} has NaN or infinite entries")
    return A


def check_square(A, name="matrix"):
    A = as_matrix(A, name)
    if A.shape[0] != A.shape[1]:
        raise NotSquare(f"{name} must be square, got shape {A.shape}")
    return A


def check_hermitian(H, name="matrix", tol=HERMITIAN_TOL):
    """Return ``(H + H^dagger) / 2`` after checking H is hermitian within ``tol``.

    The tolerance is relative to ``max(1, ||H||_F)``.
    """
    H = check_square(H, name)
    asym = np.linalg.norm(H - H.conj().T)
    if asym > tol * max(1.0, np.linalg.norm(H)):
        raise NotHermitian(f"{name} is not hermitian (||H - H^dagger||_F = {asym:.3e})")
    return (H + H.conj().T) / 2


def canonical_phase(v):
    """Multiply ``v`` by the unit phase making its largest component real positive.

    Components whose modulus is within ``PHASE_TIE_TOL`` (relative) of the
    maximum are tied; the lowest index wins.
    """
    v = np.asarray(v, dtype=np.complex128)
    mod = np.abs(v)
    top = mod.max()
    if top == 0.0:
        return v.copy()
    k = int(np.flatnonzero(mod >= top * (1.0 - PHASE_TIE_TOL))[0])
    out = v * (abs(v[k]) / v[k])
    out[k] = abs(v[k])
    return out


def canonical_columns(V):
    V = np.asarray(V, dtype=np.complex128)
    return np.column_stack([canonical_phase(V[:, k]) for k in range(V.shape[1])])


@dataclass(frozen=True)
class HermitianEig:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0


def _jacobi(H, tol, max_sweeps):
    A = H.copy()
    n = A.shape[0]
    V = np.eye(n, dtype=np.complex128)
    scale = np.linalg.norm(A)
    if scale == 0.0:
        return np.zeros(n), V, 0
    pairs = [(p, q) for p in range(n) for q in range(p + 1, n)]
    upper = np.triu_indices(n, 1)
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        off = math.sqrt(2.0) * np.linalg.norm(A[upper])
        if off < tol * scale:
            sweeps -= 1
            break
        for p, q in pairs:
            apq = A[p, q]
            b = abs(apq)
            if b < 1e-300:
                continue
            a, d = A[p, p].real, A[q, q].real
            # D = diag(1, e^{-i arg apq}) makes the block real; R then zeroes it
            theta = math.pi / 4 if d == a else 0.5 * math.atan(2.0 * b / (d - a))
            c, s = math.cos(theta), math.sin(theta)
            ph = apq / b
            W = np.array([[c, s], [-s * ph.conjugate(), c * ph.conjugate()]])
            idx = [p, q]
            A[:, idx] = A[:, idx] @ W
            A[idx, :] = W.conj().T @ A[idx, :]
            A[p, q] = A[q, p] = 0.0
            A[p, p] = A[p, p].real
            A[q, q] = A[q, q].real
            V[:, idx] = V[:, idx] @ W
    return np.diag(A).real.copy(), V, sweeps


def hermitian_eigendecomposition(H, tol=JACOBI_TOL, max_sweeps=100):
    """Eigen-decompose a hermitian matrix by cyclic Jacobi rotations.

    Eigenvalues come back ascending; each eigenvector column carries the
    canonical phase (see :func:`canonical_phase`).

    Raises
    ------
    NotSquare, NotHermitian
    """
    H = check_hermitian(H)
    w, V, sweeps = _jacobi(H, tol, max_sweeps)
    order = np.argsort(w, kind="stable")
    return HermitianEig(w[order], canonical_columns(V[:, order]), sweeps)


def unitary_from_generator(H, t=1.0):
    """``exp(-i t H)`` for hermitian ``H``, via its eigendecomposition."""
    eig = hermitian_eigendecomposition(H)
    V = eig.eigenvectors
    return (V * np.exp(-1j * t * eig.eigenvalues)) @ V.conj().T


def gram_schmidt(vectors):
    """Orthonormalize a sequence of vectors (modified Gram-Schmidt).

    Returns a matrix whose columns are the orthonormal vectors in input
    order, each with the canonical phase applied.

    Raises
    ------
    RankDeficient
        If a residual has norm below 1e-12 before normalization.
    """
    vecs = [np.asarray(v, dtype=np.complex128).ravel() for v in vectors]
    if not vecs:
        raise RankDeficient("no vectors given")
    n = vecs[0].size
    if any(v.size != n for v in vecs):
        raise DimensionMismatch("vectors have different lengths")
    if len(vecs) > n:
        raise RankDeficient(f"{len(vecs)} vectors cannot be independent in dimension {n}")
    basis = []
    for v in vecs:
        r = v.copy()
        for e in basis:
            r = r - e * np.vdot(e, r)
        norm = np.linalg.norm(r)
        if norm < RANK_TOL:
            raise RankDeficient("vectors are linearly dependent")
        basis.append(canonical_phase(r / norm))
    return np.column_stack(basis)


def commutator_norm(A, B):
    """Frobenius norm of ``AB - BA``."""
    A = check_square(A, "A")
    B = check_square(B, "B")
    if A.shape != B.shape:
        raise DimensionMismatch(f"shapes {A.shape} and {B.shape} differ")
    return float(np.linalg.norm(A @ B - B @ A))


def trace_product(A, B):
    """``Tr(AB)`` as the entrywise sum of ``A * B^T``, no product formed."""
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    if A.shape != B.shape[::-1] or A.shape[0] != B.shape[1]:
        raise DimensionMismatch(f"Tr(AB) undefined for shapes {A.shape}, {B.shape}")
    return complex(np.sum(A * B.T))


def unitarity_defect(U):
    """``||U^dagger U - I||_F``."""
    U = as_matrix(U)
    return float(np.linalg.norm(U.conj().T @ U - np.eye(U.shape[1])))


def matrix_to_json(A):
    """Row-major JSON object ``{"rows", "cols", "re", "im"}``."""
    A = as_matrix(A)
    flat = A.ravel()
    return {
        "rows": int(A.shape[0]),
        "cols": int(A.shape[1]),
        "re": [float(x) for x in flat.real],
        "im": [float(x) for x in flat.imag],
    }


def matrix_from_json(obj):
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", [0.0] * (rows * cols)), dtype=float)
    except (KeyError, TypeError) as exc:
        raise DimensionMismatch(f"malformed matrix JSON: {exc}") from exc
    if re.size != rows * cols or im.size != rows * cols:
        raise DimensionMismatch(f"expected {rows * cols} entries, got {re.size}/{im.size}")
    return as_matrix((re + 1j * im).reshape(rows, cols))
