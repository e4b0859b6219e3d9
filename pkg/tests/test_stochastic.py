import numpy as np
import pytest

from modalqm.contexts import random_context, transition_matrix
from modalqm.exceptions import BadDimension, InvalidDistribution, InvalidTarget, NotSquare
from modalqm.rng import CounterRNG
from modalqm.stochastic import (
    birkhoff_sample,
    check_doubly_stochastic,
    is_doubly_stochastic,
    parameter_count,
    sample_outcome,
)


class TestIsDoublyStochastic:
    def test_identity(self):
        assert is_doubly_stochastic(np.eye(3))

    def test_bad_columns(self):
        assert not is_doubly_stochastic([[0.5, 0.5], [0.6, 0.4]])

    def test_negative_entry(self):
        assert not is_doubly_stochastic([[1.1, -0.1], [-0.1, 1.1]])

    def test_not_square(self):
        with pytest.raises(NotSquare):
            is_doubly_stochastic(np.ones((2, 3)) / 3)

    def test_transition_matrices(self):
        for seed in range(1000):
            n = 2 + seed % 5
            P = transition_matrix(random_context(n, seed), random_context(n, seed + 7919)).probs
            assert is_doubly_stochastic(P, 1e-10)


class TestCheckTarget:
    def test_accepts_lists(self):
        B = check_doubly_stochastic([[0.3, 0.7], [0.7, 0.3]])
        assert B.dtype == np.float64

    @pytest.mark.parametrize("bad", [
        [[0.5, 0.5], [0.6, 0.4]],
        [[1.0]],
        [[np.nan, 1], [1, 0]],
        np.ones((2, 3)) / 3,
    ])
    def test_rejects(self, bad):
        with pytest.raises(InvalidTarget):
            check_doubly_stochastic(bad)


class TestParameterCount:
    @pytest.mark.parametrize("n,expected", [(2, (1, 1, 1)), (3, (4, 3, 4)), (4, (9, 6, 9)), (5, (16, 10, 16))])
    def test_values(self, n, expected):
        assert parameter_count(n) == expected

    def test_orthogonal_deficit_grows(self):
        deficits = [parameter_count(n)[0] - parameter_count(n)[1] for n in range(2, 10)]
        assert deficits[0] == 0
        assert all(b > a for a, b in zip(deficits, deficits[1:]))

    def test_bad(self):
        with pytest.raises(BadDimension):
            parameter_count(1)


class TestBirkhoffSample:
    def test_single_permutation(self):
        for seed in range(10):
            B = birkhoff_sample(4, 1, seed)
            assert set(np.unique(B)) <= {0.0, 1.0}
            assert is_doubly_stochastic(B, 0)

    def test_doubly_stochastic(self):
        for seed in range(50):
            assert is_doubly_stochastic(birkhoff_sample(5, 6, seed), 1e-12)

    def test_deterministic(self):
        np.testing.assert_array_equal(birkhoff_sample(2, 3, 9), birkhoff_sample(2, 3, 9))
        assert not np.array_equal(birkhoff_sample(2, 3, 9), birkhoff_sample(2, 3, 10))

    def test_bad(self):
        with pytest.raises(BadDimension):
            birkhoff_sample(1, 2, 0)
        with pytest.raises(BadDimension):
            birkhoff_sample(3, 0, 0)


class TestSampleOutcome:
    def test_certain(self):
        rng = CounterRNG(1)
        assert all(sample_outcome([1, 0], rng) == 0 for _ in range(200))
        assert all(sample_outcome([0, 0, 1], rng) == 2 for _ in range(200))

    def test_fair_coin(self):
        rng = CounterRNG(2)
        hits = sum(sample_outcome([0.5, 0.5], rng) == 0 for _ in range(100000))
        # 4 sigma of a fair binomial at 1e5 draws is 0.0063
        assert abs(hits / 100000 - 0.5) <= 0.01

    def test_one_draw_per_call(self):
        rng = CounterRNG(3)
        sample_outcome([0.2, 0.3, 0.5], rng)
        assert rng.counter == 1

    def test_numpy_generator_works(self):
        assert sample_outcome([0.0, 1.0], np.random.default_rng(0)) == 1

    @pytest.mark.parametrize("bad", [[0.5, 0.6], [-0.1, 1.1], [], [np.nan, 1]])
    def test_invalid(self, bad):
        with pytest.raises(InvalidDistribution):
            sample_outcome(bad, CounterRNG(0))
