"""Contexts, modalities, observables, and the maps between contexts.

A context is an orthonormal basis of C^N together with one label per
outcome.  Two contexts are linked by the transition matrix of squared
overlaps and by the unitary carrying one basis onto the other.
"""

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .exceptions import (
    BadDimension,
    DegenerateJointSpectrum,
    DegenerateSpectrum,
    DimensionMismatch,
    EmptyInput,
    IndexOutOfRange,
    LengthMismatch,
    NotCommuting,
    NotUnitary,
    UnknownContext,
)
from .rng import numpy_generator

UNITARY_TOL = 1e-10
DEGENERACY_TOL = 1e-8
COMMUTE_TOL = 1e-8
STOCHASTIC_TOL = 1e-10
CLAMP_TOL = 1e-12


def format_value(x):
    """Short deterministic text for an eigenvalue (no ``-0``)."""
    x = float(x) + 0.0
    text = f"{x:.12g}"
    return "0" if text == "-0" else text


def _readonly(a):
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Context:
    """An orthonormal basis; column ``k`` is the vector of outcome ``k``.

    The canonical phase is applied to every column on construction, so two
    contexts built from the same rays compare equal entry by entry.
    """

    id: str
    basis: np.ndarray
    labels: tuple = field(default=None)

    def __post_init__(self):
        basis = linalg.check_square(self.basis, "basis")
        n = basis.shape[0]
        if n < 2:
            raise BadDimension(f"context dimension must be >= 2, got {n}")
        defect = linalg.unitarity_defect(basis)
        if defect > UNITARY_TOL:
            raise NotUnitary(f"basis of {self.id!r} is not orthonormal (defect {defect:.3e})")
        labels = self.labels
        if labels is None:
            labels = tuple(str(k) for k in range(n))
        labels = tuple(str(x) for x in labels)
        if len(labels) != n:
            raise LengthMismatch(f"{len(labels)} labels for dimension {n}")
        object.__setattr__(self, "id", str(self.id))
        object.__setattr__(self, "basis", _readonly(linalg.canonical_columns(basis)))
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self):
        return self.basis.shape[0]

    def vector(self, index):
        if not 0 <= index < self.dim:
            raise IndexOutOfRange(f"index {index} out of range for dimension {self.dim}")
        return self.basis[:, index]

    def projector(self, index):
        u = self.vector(index)
        return np.outer(u, u.conj())

    def projectors(self):
        return [self.projector(k) for k in range(self.dim)]

    def modality(self, index):
        self.vector(index)
        return Modality(self.id, index)

    def __eq__(self, other):
        if not isinstance(other, Context):
            return NotImplemented
        return (
            self.id == other.id
            and self.labels == other.labels
            and np.array_equal(self.basis, other.basis)
        )

    def __hash__(self):
        return hash((self.id, self.labels, self.basis.tobytes()))


@dataclass(frozen=True)
class Modality:
    context_id: str
    index: int


@dataclass(frozen=True)
class Observable:
    context_id: str
    values: tuple
    operator: np.ndarray


@dataclass(frozen=True)
class TransitionMatrix:
    """Squared overlaps ``probs[i, j] = |<a_i|b_j>|^2``."""

    source_context: str
    target_context: str
    probs: np.ndarray

    @property
    def dim(self):
        return self.probs.shape[0]

    def row_deviation(self):
        return float(np.max(np.abs(self.probs.sum(axis=1) - 1.0)))

    def column_deviation(self):
        return float(np.max(np.abs(self.probs.sum(axis=0) - 1.0)))


@dataclass(frozen=True)
class ContextChange:
    source_context: str
    target_context: str
    sigma: np.ndarray


class ContextRegistry(dict):
    """Mapping ``id -> Context``; raises :class:`UnknownContext` on a miss."""

    def add(self, ctx):
        self[ctx.id] = ctx
        return ctx

    def __missing__(self, key):
        raise UnknownContext(f"no context with id {key!r}")


def _check_gaps(values, name):
    spread = float(values[-1] - values[0]) if len(values) > 1 else 0.0
    threshold = DEGENERACY_TOL * max(spread, 1.0)
    gaps = np.diff(values)
    if gaps.size and gaps.min() <= threshold:
        raise DegenerateSpectrum(
            f"{name} has a degenerate spectrum (min gap {gaps.min():.3e} <= {threshold:.3e})"
        )


def context_from_observable(A, id):
    """Eigenbasis of a non-degenerate hermitian ``A``, ascending eigenvalues.

    Returns ``(context, values)``; labels are the formatted eigenvalues.
    """
    eig = linalg.hermitian_eigendecomposition(A)
    _check_gaps(eig.eigenvalues, "observable")
    labels = [format_value(x) for x in eig.eigenvalues]
    return Context(id, eig.eigenvectors, labels), tuple(float(x) for x in eig.eigenvalues)


def _split_blocks(values):
    """Group sorted eigenvalues into clusters closer than the degeneracy gap."""
    spread = float(values[-1] - values[0]) if len(values) > 1 else 0.0
    threshold = DEGENERACY_TOL * max(spread, 1.0)
    blocks, start = [], 0
    for k in range(1, len(values) + 1):
        if k == len(values) or values[k] - values[k - 1] > threshold:
            blocks.append((start, k))
            start = k
    return blocks


def csco_context(observables, id):
    """Common eigenbasis of commuting hermitian matrices.

    Diagonalizes the first observable, then refines each degenerate
    eigenspace with the next observable, and so on.  Basis vectors are
    ordered lexicographically by their joint eigenvalue tuples, which also
    serve as outcome labels.
    """
    ops = [linalg.check_hermitian(A) for A in observables]
    if not ops:
        raise EmptyInput("at least one observable is required")
    n = ops[0].shape[0]
    if any(A.shape != (n, n) for A in ops):
        raise DimensionMismatch("observables have different dimensions")
    for a in range(len(ops)):
        for b in range(a + 1, len(ops)):
            bound = COMMUTE_TOL * max(1.0, np.linalg.norm(ops[a]) * np.linalg.norm(ops[b]))
            if linalg.commutator_norm(ops[a], ops[b]) > bound:
                raise NotCommuting(f"observables {a} and {b} do not commute")

    # each entry: (orthonormal block of columns, joint values so far)
    blocks = [(np.eye(n, dtype=np.complex128), ())]
    for A in ops:
        refined = []
        for Q, prefix in blocks:
            eig = linalg.hermitian_eigendecomposition(Q.conj().T @ A @ Q)
            W = Q @ eig.eigenvectors
            for lo, hi in _split_blocks(eig.eigenvalues):
                value = float(np.mean(eig.eigenvalues[lo:hi]))
                refined.append((W[:, lo:hi], prefix + (value,)))
        blocks = refined
    if any(Q.shape[1] != 1 for Q, _ in blocks):
        raise DegenerateJointSpectrum("joint spectrum is degenerate; the set is not complete")
    basis = np.column_stack([Q[:, 0] for Q, _ in blocks])
    labels = []
    for _, values in blocks:
        parts = [format_value(v) for v in values]
        labels.append(parts[0] if len(parts) == 1 else "(" + ",".join(parts) + ")")
    return Context(id, basis, labels)


def projector(m, contexts):
    """Rank-one projector ``u u^dagger`` of modality ``m``.

    ``contexts`` maps context ids to :class:`Context` objects.
    """
    try:
        ctx = contexts[m.context_id]
    except KeyError:
        raise UnknownContext(f"no context with id {m.context_id!r}") from None
    return ctx.projector(m.index)


def observable_operator(ctx, values):
    """``sum_i values[i] * pi_i`` over the context's projectors."""
    values = np.asarray(values, dtype=float).ravel()
    if values.size != ctx.dim:
        raise LengthMismatch(f"{values.size} values for a context of dimension {ctx.dim}")
    U = ctx.basis
    op = (U * values) @ U.conj().T
    op = (op + op.conj().T) / 2
    return Observable(ctx.id, tuple(float(v) for v in values), op)


def _check_same_dim(*ctxs):
    dims = {c.dim for c in ctxs}
    if len(dims) != 1:
        raise DimensionMismatch(f"contexts have different dimensions {sorted(dims)}")


def overlap_matrix(E, E_prime):
    """``<a_i|b_j>`` accumulated in a fixed order over components.

    The fixed order makes ``overlap_matrix(F, E)`` the exact conjugate
    transpose of ``overlap_matrix(E, F)``, bit for bit.
    """
    _check_same_dim(E, E_prime)
    A, B = E.basis, E_prime.basis
    re = np.zeros((E.dim, E.dim))
    im = np.zeros((E.dim, E.dim))
    # real arithmetic only: complex multiply may fuse operations asymmetrically
    for k in range(E.dim):
        ar, ai, br, bi = A[k].real, A[k].imag, B[k].real, B[k].imag
        re += np.outer(ar, br) + np.outer(ai, bi)
        im += np.outer(ar, bi) - np.outer(ai, br)
    return re + 1j * im


def transition_matrix(E, E_prime):
    """Doubly stochastic matrix ``p_ij = |<a_i|b_j>|^2 = Tr(pi_i pi'_j)``."""
    ov = overlap_matrix(E, E_prime)
    probs = ov.real**2 + ov.imag**2
    if probs.min() < -CLAMP_TOL or probs.max() > 1.0 + CLAMP_TOL:
        raise NotUnitary("transition probabilities fall outside [0, 1]")
    probs = np.clip(probs, 0.0, 1.0)
    tm = TransitionMatrix(E.id, E_prime.id, _readonly(probs))
    dev = max(tm.row_deviation(), tm.column_deviation())
    if dev > STOCHASTIC_TOL:
        raise NotUnitary(f"transition matrix is not doubly stochastic (deviation {dev:.3e})")
    return tm


def transition_matrix_by_traces(E, E_prime):
    """Same matrix computed literally as ``Tr(pi_i pi'_j)``; N times slower."""
    _check_same_dim(E, E_prime)
    P, Q = E.projectors(), E_prime.projectors()
    return np.array([[linalg.trace_product(p, q).real for q in Q] for p in P])


def context_change(E, E_prime):
    """Unitary ``sigma = sum_k b_k a_k^dagger`` sending ``a_k`` to ``b_k``.

    Projectors transform as ``sigma pi_k sigma^dagger = pi'_k``.
    """
    _check_same_dim(E, E_prime)
    sigma = E_prime.basis @ E.basis.conj().T
    return ContextChange(E.id, E_prime.id, _readonly(sigma))


def context_noncommutativity(E, E1, E2):
    """``||[sigma(E->E1), sigma(E->E2)]||_F``."""
    _check_same_dim(E, E1, E2)
    return linalg.commutator_norm(context_change(E, E1).sigma, context_change(E, E2).sigma)


def haar_unitary(n, rng):
    """Haar-random unitary: QR of a complex Gaussian with the R-diagonal phases removed."""
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def haar_orthogonal(n, rng):
    Z = rng.standard_normal((n, n))
    Q, R = np.linalg.qr(Z)
    return Q * np.sign(np.diag(R))


def random_context(N, seed, id=None):
    """Haar-random context, a deterministic function of ``(N, seed)``."""
    if N < 2:
        raise BadDimension(f"dimension must be >= 2, got {N}")
    U = haar_unitary(N, numpy_generator(seed, N))
    return Context(id if id is not None else f"haar-{N}-{seed}", U)


def standard_context(N, id="standard", labels=None):
    if N < 2:
        raise BadDimension(f"dimension must be >= 2, got {N}")
    return Context(id, np.eye(N, dtype=np.complex128), labels)


def transformed_context(ctx, U, id):
    """Context whose vectors are ``U a_k``; labels carried over."""
    U = linalg.check_square(U, "U")
    if U.shape[0] != ctx.dim:
        raise DimensionMismatch(f"unitary of size {U.shape[0]} for context of dimension {ctx.dim}")
    return Context(id, U @ ctx.basis, ctx.labels)
