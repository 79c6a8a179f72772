import numpy as np
import pytest

from adinash.normalform import GameTensor, StrategyProfile


@pytest.fixture
def biased_game():
    """2-player game where best-responding to sampled columns is biased:
    row player's true best action is never a best response to a pure sample."""
    u1 = np.array([[0.0, 0.0], [1.0, -2.0], [-2.0, 1.0]])
    u2 = np.zeros((3, 2))
    return GameTensor.from_player_tensors([u1, u2])


@pytest.fixture
def matching_pennies():
    u1 = np.array([[1.0, -1.0], [-1.0, 1.0]])
    return GameTensor.from_player_tensors([u1, -u1])


def random_game(rng, players=None, max_actions=4, low=-1.0, high=1.0):
    n = players if players is not None else int(rng.integers(2, 4))
    counts = rng.integers(2, max_actions + 1, size=n)
    payoffs = rng.uniform(low, high, size=(n, *counts))
    return GameTensor(payoffs)


def random_profile(rng, game, concentration=3.0):
    return StrategyProfile(
        [rng.dirichlet(np.full(m, concentration)) for m in game.action_counts]
    )


def finite_difference_adi_gradient(game, profile, kind, player, h):
    """Central differences of the exact deviation incentive, one player."""
    from adinash.adi import adi_exact

    m = profile[player].size
    out = np.zeros(m)
    for a in range(m):
        values = []
        for sign in (1.0, -1.0):
            pert = [np.array(s) for s in profile]
            pert[player][a] += sign * h
            values.append(adi_exact(game, pert, kind, validate=False).total)
        out[a] = (values[0] - values[1]) / (2.0 * h)
    return out
