"""Monte Carlo simulation of sequential projective measurements.

The state of a system is one modality of one context.  Measuring the same
context again returns the same outcome; measuring another context draws
an outcome from the matching row of the transition matrix and resets the
state to it.

Shot ``s`` of a simulation with seed ``seed`` consumes the uniforms
``uniform(seed, s, t)`` for ``t = 0, 1, ...`` (one per chain step), so
results are independent of how shots are batched or parallelized.
"""

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .contexts import (
    Context,
    Modality,
    context_from_observable,
    observable_operator,
    standard_context,
    transformed_context,
    transition_matrix,
)
from .exceptions import DimensionMismatch, IndexOutOfRange, UnknownContext
from .groups import rotation_unitary, spin_context, spin_matrices
from .rng import derive_seed, uniform_block
from .stochastic import inverse_cdf, sample_outcome

CHUNK = 1 << 16


@dataclass(frozen=True)
class SystemState:
    context: Context
    index: int

    def __post_init__(self):
        if not 0 <= self.index < self.context.dim:
            raise IndexOutOfRange(f"index {self.index} out of range for {self.context.id!r}")

    @property
    def modality(self):
        return Modality(self.context.id, self.index)

    @classmethod
    def from_modality(cls, m, contexts):
        try:
            ctx = contexts[m.context_id]
        except KeyError:
            raise UnknownContext(f"no context with id {m.context_id!r}") from None
        return cls(ctx, m.index)


@dataclass(frozen=True)
class MeasurementRecord:
    step: int
    context_id: str
    outcome_index: int


def measure(state, ctx, rng):
    """Measure ``ctx`` on ``state``; returns ``(outcome, new_state)``.

    Contexts are compared by id.  ``rng`` needs a ``random()`` method and is
    only consulted when the context changes.
    """
    if ctx.dim != state.context.dim:
        raise DimensionMismatch(f"cannot measure a {ctx.dim}-context on a {state.context.dim}-state")
    if ctx.id == state.context.id:
        return state.index, state
    row = transition_matrix(state.context, ctx).probs[state.index]
    k = sample_outcome(row, rng)
    return k, SystemState(ctx, k)


def measure_chain(initial, contexts, rng):
    """Run one shot by hand; returns the list of :class:`MeasurementRecord`."""
    state, records = initial, []
    for step, ctx in enumerate(contexts):
        k, state = measure(state, ctx, rng)
        records.append(MeasurementRecord(step, ctx.id, k))
    return records


def format_outcome(outcome):
    return "(" + ",".join(str(int(k)) for k in outcome) + ")"


@dataclass
class SequenceResult:
    shots: int
    chain: tuple
    counts: dict = field(default_factory=dict)

    @property
    def empirical_frequencies(self):
        return {k: c / self.shots for k, c in self.counts.items()}

    def frequency(self, outcome):
        return self.counts.get(tuple(outcome), 0) / self.shots

    def marginal(self, step, dim):
        """Outcome frequencies at chain position ``step``."""
        out = np.zeros(dim)
        for key, c in self.counts.items():
            out[key[step]] += c
        return out / self.shots

    def to_json(self):
        return {
            "shots": self.shots,
            "chain": list(self.chain),
            "frequencies": {format_outcome(k): c / self.shots for k, c in sorted(self.counts.items())},
        }

    def histogram_rows(self):
        return [(format_outcome(k), c, c / self.shots) for k, c in sorted(self.counts.items())]


def _check_chain(initial, contexts):
    for ctx in contexts:
        if ctx.dim != initial.context.dim:
            raise DimensionMismatch(
                f"context {ctx.id!r} has dimension {ctx.dim}, state has {initial.context.dim}"
            )


def _simulate_block(initial, contexts, seed, first, count):
    u = uniform_block(seed, count, len(contexts), first_stream=first)
    current = np.full(count, initial.index, dtype=np.int64)
    cur_ctx = initial.context
    outcomes = np.empty((count, len(contexts)), dtype=np.int64)
    for t, ctx in enumerate(contexts):
        if ctx.id != cur_ctx.id:
            P = transition_matrix(cur_ctx, ctx).probs
            cdf = np.cumsum(P, axis=1) / P.sum(axis=1, keepdims=True)
            current = inverse_cdf(cdf[current], u[:, t])
        outcomes[:, t] = current
        cur_ctx = ctx
    return outcomes


def run_sequence(initial, contexts, shots, seed):
    """Simulate ``shots`` independent runs of the measurement chain.

    ``initial`` is a :class:`SystemState` or a ``(Context, index)`` pair.
    """
    if not isinstance(initial, SystemState):
        initial = SystemState(*initial)
    contexts = list(contexts)
    if shots < 1:
        raise ValueError("shots must be >= 1")
    _check_chain(initial, contexts)
    counts = Counter()
    for first in range(0, shots, CHUNK):
        count = min(CHUNK, shots - first)
        outcomes = _simulate_block(initial, contexts, seed, first, count)
        rows, n = np.unique(outcomes, axis=0, return_counts=True)
        for row, c in zip(rows, n):
            counts[tuple(int(k) for k in row)] += int(c)
    return SequenceResult(shots, tuple(c.id for c in contexts), dict(sorted(counts.items())))


class ReciprocityEstimate(NamedTuple):
    p_hat_j_given_i: float
    p_hat_i_given_j: float
    stderr: float


def estimate_reciprocity(E, E_prime, i, j, shots, seed):
    """Estimate ``p(b_j | a_i)`` and ``p(a_i | b_j)`` by simulation.

    ``stderr`` is the larger of the two binomial standard errors.
    """
    if shots < 100:
        raise ValueError("shots must be >= 100")
    fwd = run_sequence((E, i), [E_prime], shots, derive_seed(seed, 0))
    rev = run_sequence((E_prime, j), [E], shots, derive_seed(seed, 1))
    p_f = fwd.frequency((j,))
    p_r = rev.frequency((i,))
    stderr = max(math.sqrt(p * (1 - p) / shots) for p in (p_f, p_r))
    return ReciprocityEstimate(p_f, p_r, stderr)


@dataclass(frozen=True)
class ClassicalRefinementModel:
    """Non-contextual hidden values: each context's outcome is fixed in advance."""

    hidden_assignment: dict

    def measure(self, ctx):
        try:
            return self.hidden_assignment[ctx.id]
        except KeyError:
            raise UnknownContext(f"no hidden value for context {ctx.id!r}") from None

    def run(self, contexts):
        return tuple(self.measure(c) for c in contexts)


class RefinementComparison(NamedTuple):
    quantum_return_prob: float
    classical_return_prob: float
    analytic_quantum: float


def refinement_contexts(theta):
    """Spin-1/2 contexts along z and along an axis tilted by ``theta`` toward x."""
    rep = spin_matrices("1/2")
    alpha = spin_context(rep, (0.0, 0.0, 1.0), "alpha")
    beta = spin_context(rep, (math.sin(theta), 0.0, math.cos(theta)), "beta")
    return alpha, beta


def classical_refinement_demo(theta, shots, seed):
    """Return probabilities of the chain alpha, beta, alpha from ``(alpha, +)``.

    The quantum arm samples the chain; the classical arm assigns every shot
    a predetermined beta outcome (with the quantum first-step statistics)
    and reads the values back without disturbance.
    """
    if shots < 100:
        raise ValueError("shots must be >= 100")
    alpha, beta = refinement_contexts(theta)
    plus = 1  # ascending eigenvalues: index 1 is +1/2
    quantum = run_sequence((alpha, plus), [beta, alpha], shots, seed)
    q_return = sum(c for k, c in quantum.counts.items() if k[-1] == plus) / shots

    row = transition_matrix(alpha, beta).probs[plus]
    draws = uniform_block(derive_seed(seed, 1), shots, 1)[:, 0]
    cdf = np.cumsum(row) / row.sum()
    hidden = inverse_cdf(np.broadcast_to(cdf, (shots, cdf.size)), draws)
    returned = 0
    # shots sharing a hidden beta value behave identically
    for b, n in zip(*np.unique(hidden, return_counts=True)):
        model = ClassicalRefinementModel({alpha.id: plus, beta.id: int(b)})
        if model.run([beta, alpha])[-1] == plus:
            returned += int(n)
    p = math.cos(theta / 2) ** 2
    return RefinementComparison(q_return, returned / shots, p * p + (1 - p) ** 2)


DICE_LABELS = tuple(str(k) for k in range(1, 7))


def dice_contexts(u):
    """The resting die (values 1..6) and the die turned by ``u`` under spin 5/2."""
    faces = observable_operator(standard_context(6), range(1, 7)).operator
    die, _ = context_from_observable(faces, "die")
    turned = transformed_context(die, rotation_unitary(spin_matrices("5/2"), u), "turned-die")
    return die, turned


def quantum_dice_demo(u, shots, seed):
    """Throw a die showing face 1, read it along a rotated orientation.

    Returns ``{label: frequency}`` over all six faces.
    """
    die, turned = dice_contexts(u)
    result = run_sequence((die, 0), [turned], shots, seed)
    freq = result.marginal(0, 6)
    return {label: float(f) for label, f in zip(DICE_LABELS, freq)}
