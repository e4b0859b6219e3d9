"""Realize a doubly stochastic matrix as squared moduli of a unitary.

``UnistochasticFit`` searches the unitary group, ``OrthostochasticFit``
the real orthogonal group.  Both minimize

    f(U) = sum_ij (|U_ij|^2 - B_ij)^2

by Riemannian gradient descent: ``U <- exp(-i eps G) U`` with ``G``
hermitian, backtracking on ``eps`` until ``f`` decreases.  Restarts begin
at Haar-random points and run independently; the best residual wins.

A positive residual is evidence, not proof, that ``B`` lies outside the
unistochastic (or orthostochastic) set.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .contexts import haar_orthogonal, haar_unitary
from .exceptions import BadDimension
from .linalg import matrix_to_json
from .rng import numpy_generator
from .stochastic import check_doubly_stochastic

CONVERGED_RESIDUAL = 1e-10
# residuals below this are treated as exact and the restart stops
EXACT_RESIDUAL = 1e-24
MIN_STEP = 1e-14


def _sq_moduli(U):
    return U.real * U.real + U.imag * U.imag if np.iscomplexobj(U) else U * U


def _loss(U, B):
    d = _sq_moduli(U) - B
    return float(np.dot(d.ravel(), d.ravel()))


def fit_loss(U, B):
    """``sum_ij (|U_ij|^2 - B_ij)^2``."""
    return _loss(np.asarray(U), np.asarray(B, dtype=float))


def _tangent_generator(U, B, real):
    """Hermitian G whose flow ``exp(-i t G) U`` is steepest descent at t=0."""
    R = _sq_moduli(U) - B
    grad = 4.0 * R * U
    if real:
        M = grad @ U.T
        A = (M - M.T) / 2
        return -1j * A
    M = grad @ U.conj().T
    return (-1j * M + 1j * M.conj().T) / 2


def _descend(B, U, real, max_iter, gradient_tol, initial_step):
    f = _loss(U, B)
    curve = [f]
    eigh = np.linalg.eigh
    step = initial_step
    gnorm = np.inf
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        if f <= EXACT_RESIDUAL:
            break
        G = _tangent_generator(U, B, real)
        gnorm = math.sqrt(float(_sq_moduli(G).sum()))
        if gnorm < gradient_tol:
            break
        lam, V = eigh(G)
        VhU = V.conj().T @ U
        while step >= MIN_STEP:
            trial = (V * np.exp(-1j * step * lam)) @ VhU
            if real:
                trial = trial.real
            f_trial = _loss(trial, B)
            if f_trial < f:
                U, f = trial, f_trial
                curve.append(f)
                step *= 2.0
                break
            step /= 2.0
        else:
            break
    return U, f, gnorm, n_iter, curve


@dataclass
class FitConfig:
    restarts: int = 32
    max_iterations: int = 2000
    gradient_tolerance: float = 1e-12
    seed: int = 0
    initial_step: float = 0.1

    def __post_init__(self):
        if self.restarts < 1 or self.max_iterations < 1:
            raise BadDimension("restarts and max_iterations must be >= 1")


@dataclass
class FitResult:
    best_matrix: np.ndarray
    residual: float
    restarts_run: int
    converged: bool
    per_restart_residuals: list = field(default_factory=list)

    def to_json(self):
        return {
            "residual": self.residual,
            "converged": self.converged,
            "restarts": self.restarts_run,
            "matrix": matrix_to_json(self.best_matrix),
            "per_restart": list(self.per_restart_residuals),
        }


class UnistochasticFit(BaseEstimator):
    """Search for a unitary ``U`` with ``|U_ij|^2`` equal to a target.

    Parameters
    ----------
    restarts : int
        Number of Haar-random starting points.
    max_iter : int
        Gradient steps per restart.
    gradient_tol : float
        A restart stops once the tangent gradient norm drops below this.
    initial_step : float
        First trial step length.
    random_state : int
        Restart ``r`` starts from a point drawn from sub-stream ``r``.
    n_jobs : int or None
        Restarts to run concurrently; results do not depend on it.

    Attributes
    ----------
    matrix_ : ndarray
        Best matrix found.
    residual_ : float
        Its loss.
    residuals_ : list of float
        Final loss of every restart, in restart order.
    loss_curves_ : list of list of float
        Loss after every accepted step, per restart.
    converged_ : bool
        ``residual_ <= 1e-10``.
    stationary_ : bool
        The winning restart stopped on the gradient tolerance.
    """

    _real = False

    def __init__(
        self,
        restarts=32,
        max_iter=2000,
        gradient_tol=1e-12,
        initial_step=0.1,
        random_state=0,
        n_jobs=None,
    ):
        self.restarts = restarts
        self.max_iter = max_iter
        self.gradient_tol = gradient_tol
        self.initial_step = initial_step
        self.random_state = random_state
        self.n_jobs = n_jobs

    def _start(self, n, r):
        rng = numpy_generator(0 if self.random_state is None else self.random_state, r)
        return haar_orthogonal(n, rng) if self._real else haar_unitary(n, rng)

    def fit(self, X, y=None, init=None):
        """Fit to the doubly stochastic target ``X``.

        ``init`` optionally supplies extra starting matrices, run after the
        random restarts.
        """
        if self.restarts < 1 or self.max_iter < 1:
            raise BadDimension("restarts and max_iter must be >= 1")
        B = check_doubly_stochastic(X)
        n = B.shape[0]
        dtype = np.float64 if self._real else np.complex128
        starts = [self._start(n, r) for r in range(self.restarts)]
        for U0 in init or ():
            U0 = np.asarray(U0)
            if self._real and np.iscomplexobj(U0):
                U0 = U0.real
            starts.append(np.array(U0, dtype=dtype))
        runs = Parallel(n_jobs=self.n_jobs, prefer="threads")(
            delayed(_descend)(B, U0, self._real, self.max_iter, self.gradient_tol, self.initial_step)
            for U0 in starts
        )
        self.residuals_ = [r[1] for r in runs]
        best = int(np.argmin(self.residuals_))
        U, f, gnorm, n_iter, _ = runs[best]
        self.matrix_ = U
        self.residual_ = f
        self.loss_curves_ = [r[4] for r in runs]
        self.n_iter_ = [r[3] for r in runs]
        self.n_restarts_ = len(runs)
        self.best_restart_ = best
        self.converged_ = bool(f <= CONVERGED_RESIDUAL)
        self.stationary_ = bool(gnorm < self.gradient_tol)
        return self

    @property
    def realized_(self):
        """``|U_ij|^2`` of the best matrix."""
        check_is_fitted(self, "matrix_")
        return _sq_moduli(self.matrix_)

    def score(self, X, y=None):
        """Negative loss of the fitted matrix against ``X``."""
        check_is_fitted(self, "matrix_")
        return -fit_loss(self.matrix_, check_doubly_stochastic(X))

    def to_result(self):
        check_is_fitted(self, "matrix_")
        return FitResult(
            best_matrix=np.asarray(self.matrix_, dtype=np.complex128),
            residual=self.residual_,
            restarts_run=self.n_restarts_,
            converged=self.converged_,
            per_restart_residuals=list(self.residuals_),
        )


class OrthostochasticFit(UnistochasticFit):
    """Same search restricted to real orthogonal matrices."""

    _real = True


def _estimator(cls, cfg, n_jobs):
    cfg = cfg or FitConfig()
    return cls(
        restarts=cfg.restarts,
        max_iter=cfg.max_iterations,
        gradient_tol=cfg.gradient_tolerance,
        initial_step=cfg.initial_step,
        random_state=cfg.seed,
        n_jobs=n_jobs,
    )


def unistochastic_fit(B, cfg=None, n_jobs=None, init=None):
    return _estimator(UnistochasticFit, cfg, n_jobs).fit(B, init=init).to_result()


def orthostochastic_fit(B, cfg=None, n_jobs=None, init=None):
    return _estimator(OrthostochasticFit, cfg, n_jobs).fit(B, init=init).to_result()
