"""Average-deviation-incentive descent with adaptive sampling.

The solver walks the continuum of entropy-regularized equilibria: start
uniform (the infinite-temperature solution), descend the regularized deviation
incentive estimated from sampled joint play, and halve the temperature
whenever the amortized estimate drops under the threshold. Payoff-gradient
estimates are amortized across iterations through the auxiliary variables y.
"""

import time

import numpy as np
from scipy import special

from ..adi import adi_amortized, adi_exact, adi_gradient
from ..entropy import (
    LOGIT_FLOOR,
    SHANNON_TEMP_MIN,
    Entropy,
    _hard_argmax,
    best_response,
)
from ..exact import PairwiseMatrices, exact_pairwise_matrices
from ..normalform import GameTensor, StrategyProfile, SymmetricGame
from ..oracles import BernoulliOracle, PayoffOracle, as_oracle
from ..sampling import (
    AuxiliaryState,
    SampleConfig,
    estimate_pairwise_matrices,
    new_rng,
    sample_joint_action,
    update_aux,
)
from ..simplex import mirror_step_entropic, simplex_project_euclidean, tangent_project
from .base import BaseSolver, IterateLog, profile_hash

DEFAULT_SHANNON_TEMP = 100.0
DEFAULT_TSALLIS_POWER = 1.0
TSALLIS_OFFSET_MARGIN = 0.05


def anneal_decision(kind, estimate_mean, anneal_steps, threshold, aux_learning_rate):
    """The annealing rule: halve (clipping into [0, 1], snapping below the
    family cutoff to 0) when the per-player mean estimate is strictly under
    the threshold AND at least 1/aux_learning_rate steps have elapsed since
    the last anneal. Returns (kind, anneal_steps) advanced one step."""
    if estimate_mean < threshold and anneal_steps >= 1.0 / aux_learning_rate:
        return kind.anneal(), 0
    return kind, anneal_steps + 1


def _resolve_entropy(entropy, initial_temperature):
    if isinstance(entropy, Entropy):
        return entropy
    family = str(entropy)
    if family == "none":
        return Entropy.none()
    if initial_temperature is None:
        initial_temperature = (
            DEFAULT_SHANNON_TEMP if family == "shannon" else DEFAULT_TSALLIS_POWER
        )
    return Entropy(family, float(initial_temperature))


def tsallis_offset(game):
    """Constant added so payoffs are positive: -min + margin * range."""
    table = game.payoffs if isinstance(game, GameTensor) else game.table
    low, high = float(table.min()), float(table.max())
    if low > 0.0:
        return 0.0
    spread = high - low
    return -low + TSALLIS_OFFSET_MARGIN * (spread if spread > 0.0 else 1.0)


def _step(strategy, gradient, learning_rate, projection):
    if projection == "euclidean":
        return simplex_project_euclidean(strategy - learning_rate * gradient)
    if projection == "mirror":
        return mirror_step_entropic(strategy, gradient, learning_rate)
    raise ValueError(f"unknown projection {projection!r}")


def _average_blocks(block_sets, action_counts):
    if len(block_sets) == 1:
        return block_sets[0]
    keys = block_sets[0].pairs()
    blocks = {
        key: sum(bs.matrix(*key) for bs in block_sets) / len(block_sets)
        for key in keys
    }
    return PairwiseMatrices(blocks, action_counts)


class AdidasSolver(BaseSolver):
    """Anneal-and-descend Nash approximator for general normal-form games.

    Parameters mirror the algorithm: `learning_rate` steps the strategies,
    `aux_learning_rate` tracks the payoff-gradient averages, `adi_threshold`
    triggers annealing, `samples` fresh joint actions are averaged per
    iteration. `exact_gradients` substitutes exact pairwise blocks for the
    sampled ones (the infinite-sample variant); it needs a desk-scale game,
    not a bare oracle.
    """

    def __init__(
        self,
        entropy="shannon",
        initial_temperature=None,
        learning_rate=0.01,
        aux_learning_rate=0.1,
        adi_threshold=0.001,
        iterations=1000,
        samples=1,
        bernoulli_repeats=1,
        exact_gradients=False,
        projection="euclidean",
        tangent_projection=True,
        average_iterates=False,
        anneal=True,
        exact_adi_every=None,
        seed=0,
        run_id=None,
    ):
        self.entropy = entropy
        self.initial_temperature = initial_temperature
        self.learning_rate = learning_rate
        self.aux_learning_rate = aux_learning_rate
        self.adi_threshold = adi_threshold
        self.iterations = iterations
        self.samples = samples
        self.bernoulli_repeats = bernoulli_repeats
        self.exact_gradients = exact_gradients
        self.projection = projection
        self.tangent_projection = tangent_projection
        self.average_iterates = average_iterates
        self.anneal = anneal
        self.exact_adi_every = exact_adi_every
        self.seed = seed
        self.run_id = run_id

    # -- shared helpers -----------------------------------------------------

    def _validate(self):
        if self.learning_rate <= 0.0 or self.aux_learning_rate <= 0.0:
            raise ValueError("learning rates must be positive")
        if self.adi_threshold <= 0.0:
            raise ValueError("adi_threshold must be positive")
        if self.iterations < 1:
            raise ValueError("need at least one iteration")
        if self.samples < 1:
            raise ValueError("need at least one sample per iteration")

    def _prepare_game(self, game_or_oracle):
        """Returns (oracle, desk_game or None, applied payoff offset)."""
        kind = _resolve_entropy(self.entropy, self.initial_temperature)
        desk = None
        offset = 0.0
        if isinstance(game_or_oracle, (GameTensor, SymmetricGame)):
            desk = game_or_oracle
            if kind.family == "tsallis":
                offset = tsallis_offset(desk)
                if offset:
                    desk = desk.offset(offset)
            oracle = as_oracle(desk)
        elif isinstance(game_or_oracle, PayoffOracle):
            oracle = game_or_oracle
            if isinstance(oracle, BernoulliOracle):
                desk = oracle.mean_game()
        else:
            raise TypeError(f"cannot fit {type(game_or_oracle)!r}")
        if self.exact_gradients and desk is None:
            raise ValueError("exact gradients need a desk-scale game, not a bare oracle")
        return oracle, desk, offset, kind

    def _exact_cadence(self, desk):
        if self.exact_adi_every is not None:
            return int(self.exact_adi_every)
        if desk is not None and desk.is_desk_scale():
            return max(1, int(self.iterations) // 100)
        return 0

    # -- the loop ------------------------------------------------------------

    def fit(self, game_or_oracle):
        self._validate()
        oracle, desk, offset, kind = self._prepare_game(game_or_oracle)
        counts = oracle.action_counts
        n = oracle.players
        rng = new_rng(self.seed)
        x = StrategyProfile.uniform(counts)
        aux = AuxiliaryState.zeros(counts)
        anneal_steps = 0
        cadence = self._exact_cadence(desk)
        log = IterateLog(self.run_id or f"adidas-{self.seed}", self.seed)
        queries_before = oracle.queries
        running_mean = [np.array(s) for s in x]
        sample_cfg = SampleConfig(repeats=1, bernoulli_repeats=self.bernoulli_repeats)
        started = time.perf_counter()

        for t in range(1, int(self.iterations) + 1):
            if self.exact_gradients:
                matrices = exact_pairwise_matrices(desk, x)
            else:
                block_sets = []
                for _ in range(int(self.samples)):
                    joint = sample_joint_action(x, rng)
                    block_sets.append(
                        estimate_pairwise_matrices(oracle, joint, sample_cfg)
                    )
                matrices = _average_blocks(block_sets, counts)

            nabla = [matrices.payoff_gradient(x, i) for i in range(n)]
            aux = update_aux(aux, nabla, self.aux_learning_rate)
            estimate = adi_amortized(x, aux.y, kind)
            estimate_unreg = adi_amortized(x, aux.y, Entropy.none())
            gradients = adi_gradient(matrices, aux.y, x, kind)
            if not all(np.all(np.isfinite(g)) for g in gradients):
                raise FloatingPointError(
                    f"non-finite deviation-incentive gradient at iteration {t}"
                )
            if self.tangent_projection:
                gradients = [tangent_project(g) for g in gradients]
            x = StrategyProfile(
                [
                    _step(x[i], gradients[i], self.learning_rate, self.projection)
                    for i in range(n)
                ]
            )
            if self.average_iterates:
                running_mean = [
                    m + (s - m) / t for m, s in zip(running_mean, x)
                ]

            # anneal decision from the same evaluation that produced the step
            if self.anneal:
                kind, anneal_steps = anneal_decision(
                    kind, estimate.mean, anneal_steps, self.adi_threshold, self.aux_learning_rate
                )

            exact_value = None
            report_profile = (
                StrategyProfile(running_mean) if self.average_iterates else x
            )
            if cadence and (t % cadence == 0 or t == int(self.iterations)) and desk is not None:
                exact_value = adi_exact(desk, report_profile, Entropy.none()).total
            log.append(
                iteration=t,
                adi_estimate=estimate.total,
                adi_estimate_unreg=estimate_unreg.total,
                adi_exact=exact_value,
                temperature=kind.temperature,
                queries=oracle.queries - queries_before,
                profile_digest=profile_hash(list(report_profile)),
                wall_ms=(time.perf_counter() - started) * 1000.0,
            )

        self.profile_ = StrategyProfile(running_mean) if self.average_iterates else x
        self.last_profile_ = x
        self.aux_ = aux
        self.entropy_ = kind
        self.log_ = log
        self.queries_ = oracle.queries - queries_before
        self.payoff_offset_ = offset
        return self

    def solve(self, game_or_oracle):
        """Functional form: returns (profile, log)."""
        self.fit(game_or_oracle)
        return self.profile_, self.log_


class SymmetricAdidasSolver(BaseSolver):
    """ADIDAS specialised to symmetric games and a symmetric equilibrium.

    One shared strategy and one auxiliary vector; gradients use the focal
    player's pairwise block, its transpose for the partner view, and the
    (n - 1) multiplier for identical opponents. A gradient costs m^2 queries
    per sample instead of (nm)^2.
    """

    def __init__(
        self,
        entropy="tsallis",
        initial_temperature=None,
        learning_rate=0.01,
        aux_learning_rate=0.1,
        adi_threshold=0.001,
        iterations=1000,
        samples=1,
        bernoulli_repeats=1,
        exact_gradients=False,
        projection="euclidean",
        tangent_projection=True,
        average_iterates=False,
        anneal=True,
        exact_adi_every=None,
        seed=0,
        run_id=None,
    ):
        self.entropy = entropy
        self.initial_temperature = initial_temperature
        self.learning_rate = learning_rate
        self.aux_learning_rate = aux_learning_rate
        self.adi_threshold = adi_threshold
        self.iterations = iterations
        self.samples = samples
        self.bernoulli_repeats = bernoulli_repeats
        self.exact_gradients = exact_gradients
        self.projection = projection
        self.tangent_projection = tangent_projection
        self.average_iterates = average_iterates
        self.anneal = anneal
        self.exact_adi_every = exact_adi_every
        self.seed = seed
        self.run_id = run_id

    def fit(self, game_or_oracle):
        AdidasSolver._validate(self)
        kind = _resolve_entropy(self.entropy, self.initial_temperature)
        desk = None
        offset = 0.0
        if isinstance(game_or_oracle, SymmetricGame):
            desk = game_or_oracle
            if kind.family == "tsallis":
                offset = tsallis_offset(desk)
                if offset:
                    desk = desk.offset(offset)
            oracle = as_oracle(desk)
        elif isinstance(game_or_oracle, PayoffOracle) and game_or_oracle.is_symmetric():
            oracle = game_or_oracle
            if isinstance(oracle, BernoulliOracle):
                desk = oracle.mean_game()
        else:
            raise ValueError("symmetric solver needs a symmetric game or oracle")
        if self.exact_gradients and desk is None:
            raise ValueError("exact gradients need the symmetric game itself")

        n = oracle.players
        m = oracle.action_counts[0]
        rng = new_rng(self.seed)
        x = np.full(m, 1.0 / m)
        aux = AuxiliaryState([np.zeros(m)], t=1)
        anneal_steps = 0
        cadence = self._cadence(desk)
        log = IterateLog(self.run_id or f"adidas-sym-{self.seed}", self.seed)
        queries_before = oracle.queries
        running_mean = np.array(x)
        started = time.perf_counter()

        for t in range(1, int(self.iterations) + 1):
            own = self._own_block(oracle, desk, x, rng)
            nabla = own @ x
            aux = update_aux(aux, [nabla], self.aux_learning_rate)
            y = aux.y[0]
            gradient = _symmetric_gradient(own, x, y, kind, n)
            estimate = adi_amortized(StrategyProfile([x] * n), [y] * n, kind)
            unreg_value = n * float(y.max() - np.dot(y, x))
            if not np.all(np.isfinite(gradient)):
                raise FloatingPointError(
                    f"non-finite deviation-incentive gradient at iteration {t}"
                )
            if self.tangent_projection:
                gradient = tangent_project(gradient)
            x = _step(x, gradient, self.learning_rate, self.projection)
            if self.average_iterates:
                running_mean = running_mean + (x - running_mean) / t

            if self.anneal:
                kind, anneal_steps = anneal_decision(
                    kind, estimate.mean, anneal_steps, self.adi_threshold, self.aux_learning_rate
                )

            report = running_mean if self.average_iterates else x
            exact_value = None
            if cadence and (t % cadence == 0 or t == int(self.iterations)) and desk is not None:
                exact_value = _symmetric_exact_adi(desk, report, n)
            log.append(
                iteration=t,
                adi_estimate=estimate.total,
                adi_estimate_unreg=unreg_value,
                adi_exact=exact_value,
                temperature=kind.temperature,
                queries=oracle.queries - queries_before,
                profile_digest=profile_hash([report]),
                wall_ms=(time.perf_counter() - started) * 1000.0,
            )

        self.strategy_ = np.array(running_mean if self.average_iterates else x)
        self.last_strategy_ = np.array(x)
        self.profile_ = StrategyProfile([self.strategy_] * n)
        self.aux_ = aux
        self.entropy_ = kind
        self.log_ = log
        self.queries_ = oracle.queries - queries_before
        self.payoff_offset_ = offset
        return self

    def solve(self, game_or_oracle):
        self.fit(game_or_oracle)
        return self.strategy_, self.log_

    def _cadence(self, desk):
        if self.exact_adi_every is not None:
            return int(self.exact_adi_every)
        if desk is not None and desk.shared_strategy_eval_cost() <= 10_000_000:
            return max(1, int(self.iterations) // 100)
        return 0

    def _own_block(self, oracle, desk, x, rng):
        if self.exact_gradients:
            return desk.pair_payoff_matrix(x)
        cum = np.cumsum(x)
        total = None
        fills = int(self.samples)
        for _ in range(fills):
            rest = [
                min(int(np.searchsorted(cum, rng.random(), side="right")), x.size - 1)
                for _ in range(oracle.players - 2)
            ]
            reps = int(self.bernoulli_repeats)
            block = sum(
                oracle.symmetric_pair_payoffs(rest) for _ in range(reps)
            ) / reps
            total = block if total is None else total + block
        return total / fills


def _symmetric_gradient(own, x, y, kind, players):
    """Deviation-incentive gradient for one shared strategy.

    `own` is the focal player's block (rows: own actions); the partner view is
    its transpose, and the cross term is multiplied by the (n - 1) identical
    opponents.
    """
    nabla = own @ x
    temp = kind.temperature
    if kind.family == "tsallis":
        br = best_response(y, kind)
        s = br.scale
        p = temp
        br_sparse = 1.0 - np.sum(br.dist ** (p + 1.0))
        x_sparse = 1.0 - np.sum(x ** (p + 1.0))
        effect = (br.dist - x) + (br_sparse - x_sparse) / (p + 1.0) * br.dist ** (1.0 - p)
        policy = nabla - s * x**p
    else:
        if kind.family == "shannon" and temp >= SHANNON_TEMP_MIN:
            br = special.softmax(y / temp)
            br_jac = (np.diag(br) - np.outer(br, br)) / temp
            with np.errstate(divide="ignore"):
                log_br = np.clip(np.log(br), LOGIT_FLOOR, 0.0)
            effect = (br - x) + br_jac @ (nabla - temp * (log_br + 1.0))
        else:
            effect = _hard_argmax(y) - x
        policy = np.array(nabla)
        if temp > 0.0:
            with np.errstate(divide="ignore"):
                log_x = np.clip(np.log(x), LOGIT_FLOOR, 0.0)
            policy -= temp * (log_x + 1.0)
    return -policy + (players - 1) * (own.T @ effect)


def _symmetric_exact_adi(desk, strategy, players):
    """Unregularized exact deviation incentive, summed over the n players."""
    grad = desk.deviation_payoffs(strategy)
    gain = float(grad.max() - np.dot(strategy, grad))
    return players * gain


def adidas(oracle, **params):
    """Functional surface: run the general solver, return (profile, log)."""
    return AdidasSolver(**params).solve(oracle)


def adidas_symmetric(oracle, **params):
    """Functional surface: run the symmetric solver, return (strategy, log)."""
    return SymmetricAdidasSolver(**params).solve(oracle)


def warmup_anneal_descend(
    game,
    anneal_rounds,
    descent_steps,
    anneal_increment,
    learning_rate=0.05,
    entropy_family="shannon",
    projection="euclidean",
    tangent_projection=True,
):
    """The exact-gradient warm-up: anneal the inverse temperature, re-descend.

    Starts at infinite temperature (uniform is the exact solution there) and
    after each increment of lam runs `descent_steps` exact-gradient descent
    steps on the deviation incentive at temperature 1/lam. The per-round step
    size is learning_rate * min(1, temperature): the loss curvature grows as
    1/temperature, so a fixed step leaves the stability region as the path
    cools. Dense desk-scale games only.
    """
    if isinstance(game, SymmetricGame):
        game = game.expand_to_tensor()
    lam = 0.0
    x = StrategyProfile.uniform(game.action_counts)
    n = game.players
    for _ in range(int(anneal_rounds)):
        lam += float(anneal_increment)
        temperature = 1.0 / lam
        if entropy_family == "tsallis":
            temperature = min(1.0, temperature)
        kind = Entropy(entropy_family, temperature)
        step_size = learning_rate * min(1.0, temperature)
        for _ in range(int(descent_steps)):
            matrices = exact_pairwise_matrices(game, x)
            nabla = [matrices.payoff_gradient(x, i) for i in range(n)]
            grads = adi_gradient(matrices, nabla, x, kind)
            if tangent_projection:
                grads = [tangent_project(g) for g in grads]
            x = StrategyProfile(
                [_step(x[i], grads[i], step_size, projection) for i in range(n)]
            )
    return x
