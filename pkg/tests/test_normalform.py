import itertools

import numpy as np
import pytest

from adinash.exact import expected_utility, pairwise_jacobian_exact, payoff_gradient
from adinash.normalform import (
    GameTensor,
    StrategyProfile,
    SymmetricGame,
    as_profile,
    enumerate_multisets,
    multiset_count,
    multiset_rank,
    multiset_rank_array,
    validate_joint_action,
)


class TestMultisetCounting:
    @pytest.mark.parametrize(
        "actions,players,expected",
        [
            (5, 7, 330),
            (21, 7, 888030),
            (1, 4, 1),
            (1, 11, 1),
            (2, 2, 3),
            (66, 4, 864501),
        ],
    )
    def test_counts(self, actions, players, expected):
        assert multiset_count(actions, players) == expected

    def test_rejects_degenerate(self):
        with pytest.raises(ValueError):
            multiset_count(0, 3)
        with pytest.raises(ValueError):
            multiset_count(3, 0)

    def test_no_wraparound_at_scale(self):
        # would overflow int64 if computed with fixed-width arithmetic
        big = multiset_count(1000, 30)
        assert big > 2**63

    @pytest.mark.parametrize("actions,size", [(3, 4), (5, 3), (2, 10), (7, 2)])
    def test_rank_is_bijection(self, actions, size):
        ranks = [multiset_rank(ms, actions) for ms in enumerate_multisets(actions, size)]
        assert sorted(ranks) == list(range(multiset_count(actions, size)))

    def test_rank_array_matches_scalar(self):
        ms = list(enumerate_multisets(4, 3))
        scalar = [multiset_rank(m, 4) for m in ms]
        assert multiset_rank_array(np.array(ms), 4).tolist() == scalar


class TestStrategyProfile:
    def test_uniform(self):
        p = StrategyProfile.uniform([2, 3])
        assert np.allclose(p[0], [0.5, 0.5])
        assert np.allclose(p[1], [1 / 3] * 3)

    def test_one_hot(self):
        p = StrategyProfile.one_hot([1, 0], [3, 2])
        assert p[0].tolist() == [0.0, 1.0, 0.0]

    def test_validation(self):
        with pytest.raises(ValueError):
            StrategyProfile([[0.7, 0.7]])

    def test_shape_check(self):
        with pytest.raises(ValueError):
            as_profile(StrategyProfile.uniform([2, 2]), (2, 3))


class TestJointAction:
    def test_bounds(self):
        assert validate_joint_action((1, 0), (2, 3)) == (1, 0)
        with pytest.raises(ValueError):
            validate_joint_action((2, 0), (2, 3))
        with pytest.raises(ValueError):
            validate_joint_action((0,), (2, 3))


class TestGameTensor:
    def test_shape_validation(self):
        with pytest.raises(ValueError):
            GameTensor(np.zeros((3, 2, 2)))  # player axis says 3, only 2 action axes

    def test_rejects_nonfinite(self):
        t = np.zeros((2, 2, 2))
        t[0, 0, 0] = np.inf
        with pytest.raises(ValueError):
            GameTensor(t)

    def test_payoff_lookup(self, biased_game):
        assert biased_game.payoff(0, (1, 1)) == -2.0
        assert biased_game.payoff(1, (2, 0)) == 0.0

    def test_immutable(self, biased_game):
        with pytest.raises(ValueError):
            biased_game.payoffs[0, 0, 0] = 5.0


def _random_symmetric(rng, players, actions):
    def payoff(own, opponents):
        key = (own, *sorted(opponents))
        local = np.random.default_rng(hash(key) % (2**32))
        return float(local.uniform(-1, 1))

    return SymmetricGame.from_function(players, actions, payoff)


class TestSymmetricGame:
    def test_entry_count_invariant(self):
        g = _random_symmetric(np.random.default_rng(0), 4, 3)
        assert g.entry_count == multiset_count(3, 4)

    def test_lookup_permutation_invariant(self):
        g = _random_symmetric(np.random.default_rng(0), 3, 4)
        for opponents in itertools.product(range(4), repeat=2):
            assert g.payoff(2, opponents) == g.payoff(2, tuple(reversed(opponents)))

    def test_tensor_roundtrip_lossless(self):
        g = _random_symmetric(np.random.default_rng(1), 3, 3)
        dense = g.expand_to_tensor()
        back = SymmetricGame.from_tensor(dense)
        assert np.array_equal(g.table, back.table)

    def test_from_tensor_rejects_asymmetric(self, biased_game):
        # biased game has 3 vs 2 actions; build a square asymmetric game instead
        t = np.zeros((2, 2, 2))
        t[0, 0, 1] = 1.0
        with pytest.raises(ValueError):
            SymmetricGame.from_tensor(GameTensor(t))

    def test_expected_utilities_agree_with_dense(self):
        rng = np.random.default_rng(2)
        g = _random_symmetric(rng, 3, 3)
        dense = g.expand_to_tensor()
        for _ in range(10):
            x = rng.dirichlet(np.ones(3))
            profile = StrategyProfile([x] * 3)
            dev = g.deviation_payoffs(x)
            assert np.allclose(dev, payoff_gradient(dense, profile, 0), atol=1e-12)
            assert np.allclose(
                float(np.dot(x, dev)), expected_utility(dense, profile, 1), atol=1e-12
            )

    def test_pair_matrix_matches_dense(self):
        rng = np.random.default_rng(3)
        g = _random_symmetric(rng, 4, 3)
        dense = g.expand_to_tensor()
        x = rng.dirichlet(np.ones(3))
        profile = StrategyProfile([x] * 4)
        block = pairwise_jacobian_exact(dense, profile, 0, 1).values
        assert np.allclose(g.pair_payoff_matrix(x), block, atol=1e-12)

    def test_batch_function_matches_scalar(self):
        def scalar(own, opponents):
            return float(own - 0.25 * sum(opponents))

        def batch(own, opponents):
            return own.astype(float) - 0.25 * opponents.sum(axis=1)

        a = SymmetricGame.from_function(3, 4, scalar)
        b = SymmetricGame.from_batch_function(3, 4, batch)
        assert np.allclose(a.table, b.table)

    def test_mixed_opponent_deviation_payoffs(self):
        # heterogeneous (non-shared) opponent strategies, sparse support
        rng = np.random.default_rng(4)
        g = _random_symmetric(rng, 3, 3)
        dense = g.expand_to_tensor()
        profile = StrategyProfile(
            [np.array([0.5, 0.5, 0.0]), np.array([0.0, 1.0, 0.0]), np.array([0.2, 0.3, 0.5])]
        )
        got = payoff_gradient(g, profile, 0)
        want = payoff_gradient(dense, profile, 0)
        assert np.allclose(got, want, atol=1e-12)
