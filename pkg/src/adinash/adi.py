"""The average-deviation-incentive loss and its analytic gradients.

The loss sums, over players, the gain from unilaterally deviating to a
(possibly entropy-regularized) best response; it is zero exactly at a Nash of
the regularized game. Gradients take the pairwise blocks and per-player payoff
gradients as inputs so the exact and sampled pipelines share one code path:
pass exact quantities for the true gradient, or the auxiliary estimates y for
the amortized one.
"""

from dataclasses import dataclass

import numpy as np
from scipy import special

from .entropy import (
    LOGIT_FLOOR,
    SHANNON_TEMP_MIN,
    Entropy,
    best_response,
    entropy_value,
    _hard_argmax,
)
from .exact import expected_utility, payoff_gradient
from .normalform import as_profile


@dataclass(frozen=True)
class AdiReport:
    """Per-player deviation incentives and their sum."""

    per_player: np.ndarray
    regularized: bool

    @property
    def total(self):
        return float(self.per_player.sum())

    @property
    def mean(self):
        return float(self.per_player.mean())

    @property
    def max(self):
        return float(self.per_player.max())


def adi_exact(game, x, kind=Entropy.none(), validate=True):
    """Deviation incentive of every player against exact expected payoffs.

    With an unregularized kind this is NashConv: nonnegative, zero iff Nash.
    Desk-scale games only (full enumeration).
    """
    profile = as_profile(x, game.action_counts) if validate else x
    per = np.zeros(len(profile))
    for k in range(len(profile)):
        grad = payoff_gradient(game, profile, k, validate=False)
        br = best_response(grad, kind)
        gain = float(np.dot(br.dist - profile[k], grad))
        gain += entropy_value(br.dist, kind, br.scale)
        gain -= entropy_value(profile[k], kind, br.scale)
        per[k] = gain
    return AdiReport(per, regularized=_is_regularized(kind))


def adi_amortized(x, aux, kind=Entropy.none()):
    """Deviation incentive with the auxiliary estimates y in place of the
    exact payoff gradients, including inside the best response."""
    profile = as_profile(x)
    per = np.zeros(profile.players)
    for k in range(profile.players):
        y = np.asarray(aux[k], dtype=float)
        if y.shape != profile[k].shape:
            raise ValueError(f"aux vector {k} has shape {y.shape}, want {profile[k].shape}")
        br = best_response(y, kind)
        gain = float(np.dot(y, br.dist - profile[k]))
        gain += entropy_value(br.dist, kind, br.scale)
        gain -= entropy_value(profile[k], kind, br.scale)
        per[k] = gain
    return AdiReport(per, regularized=_is_regularized(kind))


def _is_regularized(kind):
    return kind.family != "none" and kind.temperature > 0.0


def adi_gradient_shannon(matrices, grads, x, temperature):
    """Gradient of the Shannon-regularized deviation incentive per player.

    `grads` feeds the responses (exact gradients or auxiliary y); the policy
    term is rebuilt from the pairwise blocks. Below the temperature cutoff the
    response Jacobian vanishes and the hard zero-temperature limit applies.
    """
    profile = as_profile(x)
    n = profile.players
    nabla = [matrices.payoff_gradient(profile, i) for i in range(n)]
    policy, effects = [], []
    for i in range(n):
        y = np.asarray(grads[i], dtype=float)
        if temperature >= SHANNON_TEMP_MIN:
            br = special.softmax(y / temperature)
            br_jac = (np.diag(br) - np.outer(br, br)) / temperature
            with np.errstate(divide="ignore"):
                log_br = np.clip(np.log(br), LOGIT_FLOOR, 0.0)
            br_policy = nabla[i] - temperature * (log_br + 1.0)
            effect = (br - profile[i]) + br_jac @ br_policy
        else:
            effect = _hard_argmax(y) - profile[i]
        pol = np.array(nabla[i])
        if temperature > 0.0:
            with np.errstate(divide="ignore"):
                log_x = np.clip(np.log(profile[i]), LOGIT_FLOOR, 0.0)
            pol -= temperature * (log_x + 1.0)
        policy.append(pol)
        effects.append(effect)
    return _assemble(matrices, policy, effects, n)


def adi_gradient_tsallis(matrices, grads, x, power):
    """Gradient of the Tsallis-regularized deviation incentive per player.

    Requires nonnegative `grads` (offset the game first). Both sparsity
    corrections ride the scale's derivative direction BR^(1-p): the response's
    and the current strategy's regularizer values differ only through that
    shared scale, so the x-side term carries BR^(1-p) as well. At power 0 the
    corrections vanish and the policy term reduces to nabla - ||nabla||_inf,
    whose constant part the tangent projection removes.
    """
    profile = as_profile(x)
    n = profile.players
    kind = Entropy.tsallis(power)
    nabla = [matrices.payoff_gradient(profile, i) for i in range(n)]
    policy, effects = [], []
    for i in range(n):
        y = np.asarray(grads[i], dtype=float)
        if np.any(y < 0.0):
            raise ValueError("tsallis gradient needs nonnegative payoff gradients")
        br = best_response(y, kind)
        s = br.scale
        xk = profile[i]
        br_sparse = 1.0 - np.sum(br.dist ** (power + 1.0))
        x_sparse = 1.0 - np.sum(xk ** (power + 1.0))
        effect = (br.dist - xk) + (br_sparse - x_sparse) / (power + 1.0) * br.dist ** (
            1.0 - power
        )
        policy.append(nabla[i] - s * xk**power)
        effects.append(effect)
    return _assemble(matrices, policy, effects, n)


def _assemble(matrices, policy, effects, n):
    out = []
    for i in range(n):
        g = -policy[i]
        for j in range(n):
            if j != i:
                # owner-j block with i's actions on the rows
                g = g + matrices.matrix(j, i).T @ effects[j]
        out.append(g)
    return out


def adi_gradient(matrices, grads, x, kind):
    """Dispatch on the entropy family; `none` uses the zero-temperature limit."""
    if kind.family == "tsallis":
        return adi_gradient_tsallis(matrices, grads, x, kind.temperature)
    return adi_gradient_shannon(matrices, grads, x, kind.temperature)


def consensus_loss_check(game, x, validate=True):
    """Both sides of the squared-gradient-regularizer identity at power 1.

    lhs routes through the power-1 response operator and exact utility
    evaluation; rhs is the closed form sum_k ||grad_k||^2 / s_k - x_k . grad_k.
    Requires strictly positive payoffs.
    """
    if game.payoffs.min() <= 0.0:
        raise ValueError("identity needs strictly positive payoffs; offset the game")
    profile = as_profile(x, game.action_counts) if validate else x
    kind = Entropy.tsallis(1.0)
    lhs = 0.0
    rhs = 0.0
    for k in range(profile.players):
        grad = payoff_gradient(game, profile, k, validate=False)
        br = best_response(grad, kind)
        deviated = list(profile.strategies)
        deviated[k] = br.dist
        lhs += expected_utility(game, deviated, k) - expected_utility(
            game, profile, k, validate=False
        )
        rhs += float(np.dot(grad, grad) / br.scale - np.dot(profile[k], grad))
    return lhs, rhs
