"""Benchmark game generators: Colonel Blotto, the El Farol bar stage game, a
modified Shapley's bimatrix, covariant random games, and Bernoulli meta-games."""

import math
from dataclasses import dataclass

import numpy as np

from .normalform import GameTensor, SymmetricGame, multiset_count
from .oracles import BernoulliOracle


@dataclass(frozen=True)
class BlottoSpec:
    coins: int = 10
    fields: int = 3
    players: int = 4

    def __post_init__(self):
        if self.coins < 1 or self.fields < 2 or self.players < 2:
            raise ValueError("need coins >= 1, fields >= 2, players >= 2")

    @property
    def action_count(self):
        return math.comb(self.coins + self.fields - 1, self.fields - 1)


def blotto_allocations(coins, fields):
    """All ways to split `coins` over `fields`, lexicographic, as an array."""
    allocations = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            allocations.append(prefix + [remaining])
            return
        for v in range(remaining + 1):
            rec(prefix + [v], remaining - v, slots - 1)

    rec([], coins, fields)
    return np.array(allocations, dtype=np.int64)


def blotto_field_scores(own, opponents):
    """Per-field score: 2/k - 1 when tied with k-1 others at the strict max,
    -1 when beaten. Even tie splits keep the 2-player game exactly zero-sum."""
    opp = np.asarray(opponents)
    opp_max = opp.max(axis=0)
    ties = (opp == opp_max).sum(axis=0)
    win_share = np.where(
        own > opp_max, 1.0, np.where(own == opp_max, 1.0 / (1.0 + ties), 0.0)
    )
    return 2.0 * win_share - 1.0


def make_blotto(spec=BlottoSpec(), dense=False, size_budget=10_000_000):
    """Colonel Blotto over coin allocations; net fields won, ties split evenly.

    Returns the multiset-compressed symmetric game, or the dense tensor when
    `dense` (desk scale only).
    """
    actions = blotto_allocations(spec.coins, spec.fields)
    m = actions.shape[0]
    if multiset_count(m, spec.players) * spec.players > 400_000_000:
        raise ValueError("blotto spec exceeds the size budget")

    def batch_payoff(own, opponents):
        own_alloc = actions[own]  # (N, fields)
        opp_alloc = actions[opponents]  # (N, n-1, fields)
        opp_max = opp_alloc.max(axis=1)
        ties = (opp_alloc == opp_max[:, None, :]).sum(axis=1)
        share = np.where(
            own_alloc > opp_max,
            1.0,
            np.where(own_alloc == opp_max, 1.0 / (1.0 + ties), 0.0),
        )
        return (2.0 * share - 1.0).mean(axis=1)

    game = SymmetricGame.from_batch_function(spec.players, m, batch_payoff)
    if dense:
        if game.dense_entry_count > size_budget:
            raise ValueError("dense blotto tensor exceeds the size budget")
        return game.expand_to_tensor()
    return game


@dataclass(frozen=True)
class ElFarolSpec:
    players: int = 10
    crowding: float = 0.7  # capacity fraction c; the bar fits players * c
    stay_payoff: float = 1.0
    good_night: float = 2.0
    bad_night: float = 0.0

    def __post_init__(self):
        if not self.bad_night < self.stay_payoff < self.good_night:
            raise ValueError("need bad < stay < good payoffs")

    @property
    def capacity(self):
        return self.players * self.crowding


GO, STAY = 0, 1


def make_el_farol(spec=ElFarolSpec()):
    """The 2-action bar-attendance stage game: going pays off iff the bar
    (including you) stays within capacity; staying home is the safe payoff."""

    def payoff(own_action, opponents):
        if own_action == STAY:
            return spec.stay_payoff
        attendance = 1 + sum(1 for a in opponents if a == GO)
        return spec.good_night if attendance <= spec.capacity else spec.bad_night

    return SymmetricGame.from_function(spec.players, 2, payoff)


def make_modified_shapley(beta=0.5, offset=False):
    """The 3-action bimatrix whose unique Nash sits at uniform.

    `offset` shifts both payoff matrices up by beta so the minimum payoff is 0
    (needed by the Tsallis solvers).
    """
    if not 0.0 < beta < 1.0:
        raise ValueError("beta must lie in (0, 1)")
    a = np.array([[1.0, 0.0, beta], [beta, 1.0, 0.0], [0.0, beta, 1.0]])
    b = np.array([[-beta, 1.0, 0.0], [0.0, -beta, 1.0], [1.0, 0.0, -beta]])
    if offset:
        a = a + beta
        b = b + beta
    return GameTensor.from_player_tensors([a, b])


def make_covariant_random(players, actions, correlation, seed=0):
    """Random game with N(0, 1) payoffs correlated `correlation` across players
    at every outcome. Deterministic in the seed (Philox stream)."""
    n = players
    if n < 2:
        raise ValueError("need at least two players")
    low = -1.0 / (n - 1)
    if not low <= correlation <= 1.0:
        raise ValueError(f"correlation must lie in [{low}, 1]")
    cov = np.full((n, n), float(correlation))
    np.fill_diagonal(cov, 1.0)
    # eigendecomposition keeps the boundary cases (rho = 1, rho = -1/(n-1)) PSD
    eigvals, eigvecs = np.linalg.eigh(cov)
    root = eigvecs @ np.diag(np.sqrt(np.clip(eigvals, 0.0, None)))
    rng = np.random.Generator(np.random.Philox(key=int(seed)))
    outcomes = int(np.prod([actions] * n))
    z = rng.standard_normal((outcomes, n))
    values = z @ root.T
    payoffs = np.moveaxis(values.reshape((*([actions] * n), n)), -1, 0)
    return GameTensor(payoffs)


def make_bernoulli_metagame(winrates, seed=0):
    """Stochastic oracle over a symmetric winrate table: every payoff query is
    a fresh Bernoulli draw of the queried entry."""
    return BernoulliOracle(winrates, seed=seed)


def planted_winrates(players, actions, sharpness=2.0, seed=0):
    """A synthetic symmetric winrate table with a graded quality per action.

    Winrate of playing `a` in a multiset is the softmax share of its quality
    against the opponents', scaled into [0, 1]; entries sum to 1 per multiset
    like an empirical win probability.
    """
    rng = np.random.Generator(np.random.Philox(key=int(seed)))
    quality = np.sort(rng.random(actions)) * sharpness

    def winrate(own_action, opponents):
        qs = np.array([quality[own_action]] + [quality[a] for a in opponents])
        shares = np.exp(qs - qs.max())
        return float(shares[0] / shares.sum())

    return SymmetricGame.from_function(players, actions, winrate)


def chebyshev_samples(epsilon, failure_probability, variance=0.25):
    """Samples needed so the mean lands within epsilon of truth by Chebyshev."""
    if epsilon <= 0 or not 0 < failure_probability < 1:
        raise ValueError("need epsilon > 0 and failure probability in (0, 1)")
    return math.ceil(variance / (failure_probability * epsilon**2))
