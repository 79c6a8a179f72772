"""Monte-Carlo estimation of the pairwise blocks from joint play, and the
auxiliary-variable machinery that amortizes those estimates over iterations."""

from dataclasses import dataclass

import numpy as np

from .exact import PairwiseMatrices
from .normalform import as_profile


@dataclass(frozen=True)
class SampleConfig:
    """How hard to hit the oracle per estimate.

    `repeats` block fills are averaged at the given joint action (each one an
    independent draw for stochastic oracles); `bernoulli_repeats` additionally
    averages that many draws per fill for noisy entries.
    """

    repeats: int = 1
    seed: int = 0
    bernoulli_repeats: int = 1

    def __post_init__(self):
        if self.repeats < 1 or self.bernoulli_repeats < 1:
            raise ValueError("repeat counts must be >= 1")


@dataclass
class AuxiliaryState:
    """Exponentially averaged payoff-gradient estimates, one per player."""

    y: list
    t: int = 1

    @classmethod
    def zeros(cls, action_counts):
        return cls([np.zeros(m) for m in action_counts], t=1)


def new_rng(seed):
    """The project-wide counter-based generator (64-bit Philox key)."""
    return np.random.Generator(np.random.Philox(key=int(seed)))


def sample_joint_action(x, rng):
    """One independent categorical draw per player, by inverse CDF."""
    profile = as_profile(x)
    joint = []
    for strategy in profile:
        u = rng.random()
        joint.append(int(np.searchsorted(np.cumsum(strategy), u, side="right")))
    return tuple(min(a, s.size - 1) for a, s in zip(joint, profile))


def estimate_pairwise_matrices(oracle, joint_action, config=SampleConfig()):
    """Fill every ordered pair's block by substituting (r, c) into the sample.

    All pairs reuse the same joint action. Averages repeats x bernoulli_repeats
    independent fills; the query counter advances by sum_{i != j} m_i * m_j per
    fill. Oracle failures surface with the offending pair attached.
    """
    n = oracle.players
    counts = oracle.action_counts
    fills = config.repeats * config.bernoulli_repeats
    blocks = {}
    for rep in range(fills):
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                try:
                    block = oracle.pair_payoffs(i, j, joint_action)
                except Exception as err:
                    raise RuntimeError(
                        f"oracle failed on pair ({i}, {j}) at joint {tuple(joint_action)}"
                    ) from err
                if (i, j) in blocks:
                    blocks[(i, j)] += block
                else:
                    blocks[(i, j)] = block
    if fills > 1:
        for key in blocks:
            blocks[key] /= fills
    return PairwiseMatrices(blocks, counts)


def payoff_gradient_from_estimates(matrices, x, player):
    """Average of H[i][j] @ x_j over the partners j."""
    profile = as_profile(x)
    try:
        return matrices.payoff_gradient(profile, player)
    except KeyError as err:
        raise ValueError(f"missing pairwise block for player {player}") from err


def update_aux(state, grad_estimates, aux_learning_rate):
    """Track the payoff gradient: y <- y - alpha (y - grad), alpha = max(1/t, lr).

    A convex combination toward the fresh estimate; at t = 1 it copies the
    estimate outright. Returns the advanced state.
    """
    alpha = max(1.0 / state.t, float(aux_learning_rate))
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"step weight {alpha} outside (0, 1]")
    new_y = [
        y - alpha * (y - np.asarray(g, dtype=float))
        for y, g in zip(state.y, grad_estimates)
    ]
    return AuxiliaryState(new_y, state.t + 1)
