import numpy as np
import pytest

from adinash.adi import adi_exact
from adinash.entropy import Entropy
from adinash.generators import (
    GO,
    STAY,
    BlottoSpec,
    ElFarolSpec,
    blotto_allocations,
    chebyshev_samples,
    make_bernoulli_metagame,
    make_blotto,
    make_covariant_random,
    make_el_farol,
    make_modified_shapley,
    planted_winrates,
)
from adinash.normalform import StrategyProfile


class TestBlotto:
    @pytest.mark.parametrize(
        "coins,fields,expected",
        [(10, 3, 66), (10, 4, 286), (1, 2, 2), (5, 3, 21)],
    )
    def test_action_counts(self, coins, fields, expected):
        assert BlottoSpec(coins, fields, 3).action_count == expected
        assert blotto_allocations(coins, fields).shape[0] == expected

    def test_allocations_sum_to_coins(self):
        alloc = blotto_allocations(7, 3)
        assert np.all(alloc.sum(axis=1) == 7)
        assert np.all(alloc >= 0)

    def test_two_player_zero_sum(self):
        game = make_blotto(BlottoSpec(4, 2, 2), dense=True)
        assert np.allclose(game.payoffs[0] + game.payoffs[1], 0.0, atol=1e-12)

    def test_symmetric_pure_win(self):
        game = make_blotto(BlottoSpec(2, 2, 2))
        alloc = blotto_allocations(2, 2)
        # (2,0) vs (0,2): one field won, one lost -> net 0 each
        i20 = int(np.flatnonzero((alloc == [2, 0]).all(axis=1))[0])
        i02 = int(np.flatnonzero((alloc == [0, 2]).all(axis=1))[0])
        assert game.payoff(i20, (i02,)) == pytest.approx(0.0)
        # (1,1) vs (2,0): loses field 1, wins field 2 -> 0
        i11 = int(np.flatnonzero((alloc == [1, 1]).all(axis=1))[0])
        assert game.payoff(i11, (i20,)) == pytest.approx(0.0)

    def test_tie_splits_keep_scores_in_range(self):
        game = make_blotto(BlottoSpec(3, 3, 3))
        assert game.table.min() >= -1.0
        assert game.table.max() <= 1.0

    def test_size_budget(self):
        with pytest.raises(ValueError):
            make_blotto(BlottoSpec(10, 3, 4), dense=True)


class TestElFarol:
    def test_everyone_stays(self):
        game = make_el_farol()
        assert game.payoff(STAY, (STAY,) * 9) == 1.0

    def test_lone_goer_enjoys_the_bar(self):
        game = make_el_farol()
        assert game.payoff(GO, (STAY,) * 9) == 2.0

    def test_crowded_bar(self):
        game = make_el_farol()
        assert game.payoff(GO, (GO,) * 9) == 0.0

    def test_capacity_boundary(self):
        game = make_el_farol()
        # 7 goers total meets capacity exactly; be the 7th
        assert game.payoff(GO, (GO,) * 6 + (STAY,) * 3) == 2.0
        assert game.payoff(GO, (GO,) * 7 + (STAY,) * 2) == 0.0

    def test_payoff_depends_only_on_attendance(self):
        game = make_el_farol()
        for goers in range(10):
            opponents = [GO] * goers + [STAY] * (9 - goers)
            base = game.payoff(GO, opponents)
            for perm in (tuple(reversed(opponents)), tuple(sorted(opponents))):
                assert game.payoff(GO, perm) == base

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            ElFarolSpec(stay_payoff=3.0)  # must sit between bad and good


class TestModifiedShapley:
    def test_table_entries(self):
        game = make_modified_shapley(0.5)
        a = game.player_tensor(0)
        b = game.player_tensor(1)
        assert a[0].tolist() == [1.0, 0.0, 0.5]
        assert a[1].tolist() == [0.5, 1.0, 0.0]
        assert b[0].tolist() == [-0.5, 1.0, 0.0]
        assert game.payoff(0, (0, 2)) == 0.5

    def test_uniform_is_nash(self):
        game = make_modified_shapley(0.5)
        report = adi_exact(game, StrategyProfile.uniform([3, 3]), Entropy.none())
        assert report.total == pytest.approx(0.0, abs=1e-12)

    def test_offset_variant_nonnegative(self):
        game = make_modified_shapley(0.5, offset=True)
        assert game.payoffs.min() == 0.0

    def test_beta_validation(self):
        with pytest.raises(ValueError):
            make_modified_shapley(1.0)


class TestCovariantRandom:
    def test_perfect_correlation(self):
        game = make_covariant_random(3, 2, 1.0, seed=5)
        assert np.allclose(game.payoffs[0], game.payoffs[1], atol=1e-12)
        assert np.allclose(game.payoffs[0], game.payoffs[2], atol=1e-12)

    def test_zero_correlation_empirical(self):
        game = make_covariant_random(2, 100, 0.0, seed=6)
        a = game.payoffs[0].ravel()
        b = game.payoffs[1].ravel()
        r = np.corrcoef(a, b)[0, 1]
        assert abs(r) <= 0.05

    def test_seed_determinism(self):
        g1 = make_covariant_random(3, 3, -0.3, seed=9)
        g2 = make_covariant_random(3, 3, -0.3, seed=9)
        assert np.array_equal(g1.payoffs, g2.payoffs)
        g3 = make_covariant_random(3, 3, -0.3, seed=10)
        assert not np.array_equal(g1.payoffs, g3.payoffs)

    def test_correlation_bounds(self):
        with pytest.raises(ValueError):
            make_covariant_random(3, 2, -0.6, seed=0)  # below -1/(n-1)

    def test_standardized_marginals(self):
        game = make_covariant_random(2, 80, 0.5, seed=11)
        values = game.payoffs.reshape(2, -1)
        assert abs(values.mean()) <= 0.05
        assert abs(values.std() - 1.0) <= 0.05


class TestBernoulliMetagame:
    def test_oracle_type_and_flags(self):
        oracle = make_bernoulli_metagame(planted_winrates(4, 3, seed=1), seed=2)
        assert oracle.deterministic is False
        assert oracle.players == 4

    def test_mean_tracks_winrate(self):
        table = planted_winrates(3, 2, seed=3)
        oracle = make_bernoulli_metagame(table, seed=4)
        joint = (0, 1, 1)
        p = table.payoff(0, (1, 1))
        draws = 10_000
        mean = np.mean([oracle.query(0, joint) for _ in range(draws)])
        assert abs(mean - p) <= 0.02

    def test_chebyshev_sample_count(self):
        # winrate within 0.01 at 95%: far more than the 223-per-entry budget
        assert chebyshev_samples(0.01, 0.05) > 223

    def test_planted_winrates_valid(self):
        table = planted_winrates(7, 5, seed=5)
        assert table.table.min() >= 0.0
        assert table.table.max() <= 1.0
        assert table.entry_count == 330
