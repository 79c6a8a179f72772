"""Normal-form game representations.

Three views of the same object: a dense payoff tensor, a multiset-compressed
symmetric game, and (in :mod:`adinash.oracles`) query-by-joint-action access.
"""

import itertools
import math

import numpy as np

from .simplex import as_distribution

DESK_SCALE_ENTRIES = 10_000_000


def multiset_count(actions, players):
    """Number of multisets of cardinality ``players`` over ``actions`` symbols.

    Equals (m+n-1)! / (n! (m-1)!). Exact integer arithmetic, no wraparound.
    """
    if actions < 1 or players < 1:
        raise ValueError("need at least one action and one player")
    return math.comb(actions + players - 1, players)


def multiset_rank(multiset, actions):
    """Colex rank of an ascending-sorted multiset among all of its size.

    Maps the multiset (a_1 <= ... <= a_k) to the strictly increasing
    combination (a_i + i) and ranks via the combinatorial number system.
    """
    rank = 0
    for i, a in enumerate(multiset):
        rank += math.comb(a + i, i + 1)
    return rank


_COMB_TABLE_CACHE = {}


def _comb_table(actions, k):
    key = (actions, k)
    if key not in _COMB_TABLE_CACHE:
        table = np.zeros((actions + k, k + 1), dtype=np.int64)
        for v in range(actions + k):
            for j in range(1, k + 1):
                table[v, j] = math.comb(v, j)
        _COMB_TABLE_CACHE[key] = table
    return _COMB_TABLE_CACHE[key]


def multiset_rank_array(multisets, actions):
    """Vectorized multiset_rank over an (N, k) array of sorted rows."""
    ms = np.asarray(multisets, dtype=np.int64)
    if ms.ndim == 1:
        ms = ms[None, :]
    k = ms.shape[1]
    table = _comb_table(actions, k)
    idx = ms + np.arange(k, dtype=np.int64)
    return table[idx, np.arange(1, k + 1)].sum(axis=1)


def enumerate_multisets(actions, size):
    """Ascending-sorted multisets of the given size, in lexicographic order."""
    return itertools.combinations_with_replacement(range(actions), size)


def validate_joint_action(joint, action_counts):
    a = tuple(int(v) for v in joint)
    if len(a) != len(action_counts):
        raise ValueError(f"joint action length {len(a)} != players {len(action_counts)}")
    for i, (ai, mi) in enumerate(zip(a, action_counts)):
        if not 0 <= ai < mi:
            raise ValueError(f"player {i} action {ai} outside [0, {mi})")
    return a


class StrategyProfile:
    """One mixed strategy per player, each validated onto its simplex."""

    def __init__(self, strategies):
        self.strategies = tuple(as_distribution(s) for s in strategies)

    @classmethod
    def uniform(cls, action_counts):
        return cls([np.full(m, 1.0 / m) for m in action_counts])

    @classmethod
    def one_hot(cls, actions, action_counts):
        strategies = []
        for a, m in zip(actions, action_counts):
            v = np.zeros(m)
            v[a] = 1.0
            strategies.append(v)
        return cls(strategies)

    @property
    def players(self):
        return len(self.strategies)

    @property
    def action_counts(self):
        return tuple(s.size for s in self.strategies)

    def __len__(self):
        return len(self.strategies)

    def __getitem__(self, i):
        return self.strategies[i]

    def __iter__(self):
        return iter(self.strategies)

    def __repr__(self):
        return f"StrategyProfile({[np.round(s, 4).tolist() for s in self.strategies]})"


def as_profile(x, action_counts=None):
    """Coerce a StrategyProfile or sequence of per-player vectors."""
    profile = x if isinstance(x, StrategyProfile) else StrategyProfile(x)
    if action_counts is not None and profile.action_counts != tuple(action_counts):
        raise ValueError(
            f"profile shapes {profile.action_counts} do not match game {tuple(action_counts)}"
        )
    return profile


class GameTensor:
    """Dense n-player payoff tensor: payoffs[i, a_1, ..., a_n] = u_i(a)."""

    def __init__(self, payoffs):
        arr = np.asarray(payoffs, dtype=float)
        if arr.ndim < 2:
            raise ValueError("payoff tensor needs a player axis plus one axis per player")
        if arr.shape[0] != arr.ndim - 1:
            raise ValueError(
                f"player axis {arr.shape[0]} inconsistent with {arr.ndim - 1} action axes"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError("payoff tensor has non-finite entries")
        arr = arr.copy()
        arr.flags.writeable = False
        self.payoffs = arr
        self.players = arr.shape[0]
        self.action_counts = tuple(arr.shape[1:])

    @classmethod
    def from_player_tensors(cls, tensors):
        return cls(np.stack([np.asarray(t, dtype=float) for t in tensors], axis=0))

    def player_tensor(self, i):
        return self.payoffs[i]

    def payoff(self, i, joint):
        joint = validate_joint_action(joint, self.action_counts)
        return float(self.payoffs[(i, *joint)])

    @property
    def entry_count(self):
        return self.payoffs.size

    def is_desk_scale(self, budget=DESK_SCALE_ENTRIES):
        return self.entry_count <= budget

    def offset(self, constant):
        """New game with `constant` added to every payoff of every player."""
        return GameTensor(self.payoffs + float(constant))

    def __eq__(self, other):
        return (
            isinstance(other, GameTensor)
            and self.action_counts == other.action_counts
            and np.array_equal(self.payoffs, other.payoffs)
        )

    def __repr__(self):
        return f"GameTensor(players={self.players}, actions={self.action_counts})"


class SymmetricGame:
    """Permutation-invariant game stored one entry per action multiset.

    ``table[rank(multiset)]`` holds the per-position payoffs aligned with the
    ascending-sorted multiset, so positions playing equal actions carry equal
    payoffs and the focal-player lookup is (own action, opponent multiset).
    """

    def __init__(self, players, actions, table):
        self.players = int(players)
        self.actions = int(actions)
        table = np.asarray(table, dtype=float)
        expected = multiset_count(self.actions, self.players)
        if table.shape != (expected, self.players):
            raise ValueError(
                f"table shape {table.shape} != ({expected}, {self.players}) "
                f"for {self.actions} actions, {self.players} players"
            )
        if not np.all(np.isfinite(table)):
            raise ValueError("payoff table has non-finite entries")
        table = table.copy()
        table.flags.writeable = False
        self.table = table
        self._keys = None
        self._dev_table = None
        self._pair_cache = None

    # -- construction -----------------------------------------------------

    @classmethod
    def from_function(cls, players, actions, payoff_fn):
        """Build from ``payoff_fn(own_action, opponent_multiset) -> float``."""
        count = multiset_count(actions, players)
        table = np.zeros((count, players))
        for ms in enumerate_multisets(actions, players):
            r = multiset_rank(ms, actions)
            for pos in range(players):
                opponents = ms[:pos] + ms[pos + 1:]
                table[r, pos] = payoff_fn(ms[pos], opponents)
        return cls(players, actions, table)

    @classmethod
    def from_batch_function(cls, players, actions, batch_fn):
        """Build from a vectorized ``batch_fn(own (N,), opponents (N, n-1)) -> (N,)``."""
        keys = np.array(list(enumerate_multisets(actions, players)), dtype=np.int64)
        ranks = multiset_rank_array(keys, actions)
        table = np.zeros((keys.shape[0], players))
        cols = np.arange(players)
        for pos in range(players):
            opponents = keys[:, cols != pos]
            table[ranks, pos] = batch_fn(keys[:, pos], opponents)
        return cls(players, actions, table)

    @classmethod
    def from_tensor(cls, game, tol=1e-12):
        """Compress a dense tensor, verifying permutation invariance."""
        n = game.players
        if len(set(game.action_counts)) != 1:
            raise ValueError("symmetric game needs identical action counts")
        m = game.action_counts[0]
        count = multiset_count(m, n)
        table = np.full((count, n), np.nan)
        for joint in itertools.product(range(m), repeat=n):
            order = np.argsort(joint, kind="stable")
            ms = tuple(joint[o] for o in order)
            r = multiset_rank(ms, m)
            for pos, player in enumerate(order):
                value = game.payoffs[(player, *joint)]
                if np.isnan(table[r, pos]):
                    table[r, pos] = value
                elif abs(table[r, pos] - value) > tol:
                    raise ValueError(
                        f"tensor is not permutation-invariant at multiset {ms}"
                    )
        return cls(n, m, table)

    # -- lookups -----------------------------------------------------------

    def keys(self):
        """Sorted multiset keys as an (entries, players) int array."""
        if self._keys is None:
            keys = np.array(
                list(enumerate_multisets(self.actions, self.players)), dtype=np.int64
            )
            ranks = multiset_rank_array(keys, self.actions)
            ordered = np.empty_like(keys)
            ordered[ranks] = keys
            self._keys = ordered
        return self._keys

    def position_payoffs(self, multiset):
        ms = tuple(sorted(int(a) for a in multiset))
        return self.table[multiset_rank(ms, self.actions)]

    def payoff(self, own_action, opponents):
        """Payoff to a player choosing own_action against an opponent multiset."""
        joint = tuple(sorted((int(own_action), *map(int, opponents))))
        pos = joint.index(int(own_action))
        return float(self.table[multiset_rank(joint, self.actions)][pos])

    @property
    def entry_count(self):
        return self.table.shape[0]

    @property
    def action_counts(self):
        return (self.actions,) * self.players

    @property
    def dense_entry_count(self):
        return self.players * self.actions**self.players

    def is_desk_scale(self, budget=DESK_SCALE_ENTRIES):
        return self.dense_entry_count <= budget

    def shared_strategy_eval_cost(self):
        """Work for one exact deviation-payoff evaluation at a shared strategy."""
        return self.actions * multiset_count(self.actions, self.players - 1)

    def offset(self, constant):
        return SymmetricGame(self.players, self.actions, self.table + float(constant))

    # -- exact evaluation against a shared mixed strategy -------------------

    @staticmethod
    def _multiset_weights(multisets, actions):
        """Action-count matrix and log multinomial coefficients for iid draws."""
        from scipy.special import gammaln

        size = multisets.shape[1]
        counts = np.zeros((multisets.shape[0], actions), dtype=np.float64)
        for j in range(actions):
            counts[:, j] = (multisets == j).sum(axis=1)
        log_coef = math.lgamma(size + 1) - gammaln(counts + 1.0).sum(axis=1)
        return counts, log_coef

    def _deviation_table(self):
        """Payoff of (own action, opponent multiset), shape (m, #opp-multisets)."""
        if self._dev_table is None:
            m, n = self.actions, self.players
            opp = np.array(
                list(enumerate_multisets(m, n - 1)), dtype=np.int64
            ).reshape(-1, n - 1)
            dev = np.zeros((m, opp.shape[0]))
            # rank of sorted({a} U M) and the position of a inside it, vectorized
            for a in range(m):
                joint = np.concatenate(
                    [opp, np.full((opp.shape[0], 1), a, dtype=np.int64)], axis=1
                )
                joint.sort(axis=1)
                pos = np.argmax(joint == a, axis=1)
                ranks = multiset_rank_array(joint, m)
                dev[a] = self.table[ranks, pos]
            counts, log_coef = self._multiset_weights(opp, m)
            self._dev_table = (dev, counts, log_coef)
        return self._dev_table

    def opponent_profile_weights(self, strategy):
        """Probability of each opponent multiset under iid play of `strategy`."""
        x = as_distribution(strategy, self.actions)
        _, counts, log_coef = self._deviation_table()
        logs = counts @ np.log(np.clip(x, 1e-300, None))
        return np.exp(log_coef + logs)

    def deviation_payoffs(self, strategy):
        """Exact expected payoff of each own action when opponents play `strategy`."""
        dev, _, _ = self._deviation_table()
        return dev @ self.opponent_profile_weights(strategy)

    def pair_payoff_matrix(self, strategy):
        """Exact m x m matrix G[r, c] = E[u(r; c, rest)] with rest ~ strategy iid.

        G is the focal player's view of the bimatrix game against one designated
        opponent; by exchangeability the opponent's view is G.T.
        """
        x = as_distribution(strategy, self.actions)
        table, counts, log_coef, _ = self._pair_table()
        weights = np.exp(log_coef + counts @ np.log(np.clip(x, 1e-300, None)))
        return table @ weights

    def _pair_table(self):
        """u(r; c, rest_k) for all r, c, k plus rest-multiset weights; cached."""
        if self._pair_cache is None:
            m = self.actions
            if self.players == 2:
                rest = np.zeros((1, 0), dtype=np.int64)
            else:
                rest = np.array(
                    list(enumerate_multisets(m, self.players - 2)), dtype=np.int64
                )
            out = np.zeros((m, m, rest.shape[0]))
            for c in range(m):
                joint = np.concatenate(
                    [rest, np.full((rest.shape[0], 1), c, dtype=np.int64)], axis=1
                )
                for r in range(m):
                    full = np.concatenate(
                        [joint, np.full((joint.shape[0], 1), r, dtype=np.int64)], axis=1
                    )
                    full.sort(axis=1)
                    pos = np.argmax(full == r, axis=1)
                    ranks = multiset_rank_array(full, m)
                    out[r, c] = self.table[ranks, pos]
            counts, log_coef = self._multiset_weights(rest, m)
            index = {tuple(row): k for k, row in enumerate(rest.tolist())}
            self._pair_cache = (out, counts, log_coef, index)
        return self._pair_cache

    def pair_block_at(self, rest_actions):
        """The (m, m) block u(r; c, rest) for one fixed opponent rest; served
        from the cached pair table when it fits the desk budget, else None."""
        if self.players > 2:
            size = self.actions**2 * multiset_count(self.actions, self.players - 2)
        else:
            size = self.actions**2
        if self._pair_cache is None and size > 20_000_000:
            return None
        table, _, _, index = self._pair_table()
        key = tuple(sorted(int(a) for a in rest_actions))
        return np.array(table[:, :, index[key]])

    def expand_to_tensor(self):
        """Dense GameTensor; desk-scale games only."""
        if not self.is_desk_scale():
            raise ValueError("game too large to expand densely")
        m, n = self.actions, self.players
        payoffs = np.zeros((n, *([m] * n)))
        for joint in itertools.product(range(m), repeat=n):
            for i in range(n):
                opponents = joint[:i] + joint[i + 1:]
                payoffs[(i, *joint)] = self.payoff(joint[i], opponents)
        return GameTensor(payoffs)

    def __repr__(self):
        return (
            f"SymmetricGame(players={self.players}, actions={self.actions}, "
            f"entries={self.entry_count})"
        )
