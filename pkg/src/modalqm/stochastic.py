"""Doubly stochastic matrices: checks, sampling, parameter counts."""

import numpy as np
from sklearn.utils import check_array

from .exceptions import BadDimension, InvalidDistribution, InvalidTarget, NotSquare
from .rng import numpy_generator

TARGET_TOL = 1e-10


def is_doubly_stochastic(M, tol=TARGET_TOL):
    """True iff entries are >= -tol and every row and column sums to 1 within tol."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise NotSquare(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        return False
    return bool(
        M.min() >= -tol
        and np.all(np.abs(M.sum(axis=1) - 1.0) <= tol)
        and np.all(np.abs(M.sum(axis=0) - 1.0) <= tol)
    )


def check_doubly_stochastic(B, tol=TARGET_TOL):
    """Validate a fit target and return it as a float array.

    Raises
    ------
    InvalidTarget
        If ``B`` is not a finite square doubly stochastic matrix (N >= 2).
    """
    try:
        B = check_array(B, dtype=np.float64, ensure_min_samples=2, ensure_min_features=2)
    except ValueError as exc:
        raise InvalidTarget(str(exc)) from exc
    if B.shape[0] != B.shape[1]:
        raise InvalidTarget(f"target must be square, got shape {B.shape}")
    if not is_doubly_stochastic(B, tol):
        raise InvalidTarget("target is not doubly stochastic")
    return B


def parameter_count(N):
    """Return ``(polytope_dim, orthogonal_dim, unitary_overlap_dim)``.

    The Birkhoff polytope has dimension (N-1)^2, the orthogonal group
    N(N-1)/2, and squared moduli of unitaries (modulo left and right
    diagonal phases) again (N-1)^2.
    """
    if N < 2:
        raise BadDimension(f"dimension must be >= 2, got {N}")
    return (N - 1) ** 2, N * (N - 1) // 2, (N - 1) ** 2


def birkhoff_sample(N, num_permutations, seed):
    """Dirichlet(1,...,1) mixture of uniformly random permutation matrices."""
    if N < 2:
        raise BadDimension(f"dimension must be >= 2, got {N}")
    if num_permutations < 1:
        raise BadDimension("num_permutations must be >= 1")
    rng = numpy_generator(seed, N)
    weights = rng.dirichlet(np.ones(num_permutations))
    weights = weights / weights.sum()
    B = np.zeros((N, N))
    eye = np.eye(N)
    for w in weights:
        B += w * eye[rng.permutation(N)]
    return B


def _cumulative(probabilities):
    p = np.asarray(probabilities, dtype=float)
    if p.ndim != 1 or p.size == 0 or not np.all(np.isfinite(p)):
        raise InvalidDistribution("probabilities must be a non-empty finite vector")
    if p.min() < 0:
        raise InvalidDistribution("negative probability")
    total = p.sum()
    if abs(total - 1.0) > 1e-9:
        raise InvalidDistribution(f"probabilities sum to {total!r}")
    return np.cumsum(p) / total


def inverse_cdf(cdf, u):
    """Index of the first cumulative value exceeding ``u``.

    ``cdf`` may be a vector or a stack of rows (one per ``u``).
    """
    cdf = np.asarray(cdf)
    if cdf.ndim == 1:
        return min(int(np.searchsorted(cdf, u, side="right")), cdf.size - 1)
    idx = (cdf <= np.asarray(u)[:, None]).sum(axis=1)
    return np.minimum(idx, cdf.shape[1] - 1)


def sample_outcome(probabilities, rng):
    """Draw one index from ``probabilities`` by inverse CDF.

    ``rng`` is anything with a ``random()`` method returning a uniform in
    [0, 1); exactly one variate is consumed.
    """
    cdf = _cumulative(probabilities)
    return inverse_cdf(cdf, rng.random())
