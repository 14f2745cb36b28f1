"""Training loops for every learning method, behind one entry point.

Methods are registered under the benchmark's report names. Each loop is
deterministic given its seed: exploration draws come from one derived
stream and each episode's environment randomness from another, so two
runs with the same seed produce identical tables, weights, and logs.
"""

from __future__ import annotations

import csv
import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import environment as env
from ..discretizers import encode, make_discretizer
from ..dynamics import TransitionModel
from ..environment import (
    FIVE_ACTION_GRID,
    STANDARD_GRID,
    ActionGrid,
    EpisodeConfig,
    RewardParams,
)
from ..errors import DivergenceError
from ..market_data import StateSeries
from ..seeding import agent_rng, episode_rng
from .actor_critic import (
    FeatureScaler,
    LinearActorCritic,
    actor_critic_step,
    reinforce_episode_update,
)
from .baselines import TAYLOR_STANDARD, TAYLOR_TUNED, HoldPolicy, TaylorPolicy
from .bayesian import GaussianQPosterior, bayes_q_update, thompson_select, ucb_select
from .dqn import DqnNet, dqn_train_step
from .policies import ActorCriticPolicy, DqnPolicy, TabularPolicy
from .tabular import QTable, epsilon_greedy, epsilon_schedule, q_learning_update, sarsa_update

GRIDS = {"standard": STANDARD_GRID, "five": FIVE_ACTION_GRID}


@dataclass(frozen=True)
class TabularTrainConfig:
    algorithm: str                 # "q" or "sarsa"
    discretizer: str
    grid: str
    episodes: int = 5000
    alpha: float = 0.1
    gamma: float = 0.99
    epsilon: float = 0.1
    epsilon_decay: tuple[float, float] | None = None  # (start, end), overrides epsilon


@dataclass(frozen=True)
class BayesTrainConfig:
    selector: str                  # "thompson" or "ucb"
    discretizer: str = "legacy"
    grid: str = "standard"
    episodes: int = 5000
    gamma: float = 0.99
    prior_mu: float = 0.0
    prior_variance: float = 250_000.0
    obs_noise_variance: float = 100.0
    ucb_c: float = 2.0


@dataclass(frozen=True)
class ActorCriticTrainConfig:
    grid: str = "standard"
    episodes: int = 5000
    alpha_theta: float = 1e-3
    alpha_w: float = 1e-2
    gamma: float = 0.99
    reinforce_mode: bool = False   # full-episode updates instead of per-step TD


@dataclass(frozen=True)
class DqnTrainConfig:
    grid: str = "standard"
    episodes: int = 5000
    hidden: tuple[int, ...] = (64, 64)
    buffer_capacity: int = 10_000
    batch_size: int = 64
    learning_rate: float = 1e-3
    gamma: float = 0.99
    target_sync_every: int = 100
    epsilon_start: float = 1.0
    epsilon_end: float = 0.05
    epsilon_decay_fraction: float = 0.8  # share of planned steps spent decaying


def default_method_configs() -> dict[str, object]:
    """Benchmark registry keyed by report row names."""
    return {
        "q_legacy": TabularTrainConfig("q", "legacy", "standard"),
        "q_coarse": TabularTrainConfig("q", "coarse", "standard"),
        "q_reduced": TabularTrainConfig("q", "reduced", "standard"),
        "q_tuned": TabularTrainConfig(
            "q", "tuned", "five", episodes=10_000, epsilon_decay=(0.9, 0.01)
        ),
        "sarsa_coarse": TabularTrainConfig("sarsa", "coarse", "standard"),
        "actor_critic": ActorCriticTrainConfig(),
        "dqn": DqnTrainConfig(),
        "bayes_thompson": BayesTrainConfig("thompson"),
        "bayes_ucb": BayesTrainConfig("ucb"),
    }


METHOD_NAMES = tuple(default_method_configs().keys())
BASELINE_NAMES = ("taylor", "taylor_tuned", "hold")


def make_baseline_policy(name: str, grid: ActionGrid = STANDARD_GRID, pi_star: float = 2.0):
    if name == "taylor":
        return TaylorPolicy(TAYLOR_STANDARD, grid, pi_star)
    if name == "taylor_tuned":
        return TaylorPolicy(TAYLOR_TUNED, grid, pi_star)
    if name == "hold":
        return HoldPolicy(grid)
    raise ValueError(f"unknown baseline {name!r}; valid: {', '.join(BASELINE_NAMES)}")


def override_config(config, overrides: dict):
    """Return a copy of a method config with fields replaced.

    Unknown keys are rejected so config-file typos fail loudly.
    """
    valid = {f.name: f for f in dataclasses.fields(config)}
    unknown = sorted(set(overrides) - set(valid))
    if unknown:
        raise ValueError(
            f"unknown hyperparameter(s) {unknown} for {type(config).__name__}; "
            f"valid: {sorted(valid)}"
        )
    coerced = {}
    for key, value in overrides.items():
        if isinstance(value, list):
            value = tuple(value)
        coerced[key] = value
    return dataclasses.replace(config, **coerced)


@dataclass
class TrainingLog:
    """Per-episode training trace, exportable as CSV."""

    method: str
    seed: int
    episodes: list[int] = field(default_factory=list)
    returns: list[float] = field(default_factory=list)
    epsilons: list[float | None] = field(default_factory=list)
    mean_posterior_sigmas: list[float | None] = field(default_factory=list)

    def append(self, episode: int, ep_return: float, epsilon: float | None = None,
               mean_posterior_sigma: float | None = None) -> None:
        self.episodes.append(episode)
        self.returns.append(ep_return)
        self.epsilons.append(epsilon)
        self.mean_posterior_sigmas.append(mean_posterior_sigma)

    def __len__(self) -> int:
        return len(self.episodes)

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["episode", "return", "epsilon", "mean_posterior_sigma"])
            for i in range(len(self.episodes)):
                writer.writerow(
                    [
                        self.episodes[i],
                        repr(self.returns[i]),
                        "" if self.epsilons[i] is None else repr(self.epsilons[i]),
                        ""
                        if self.mean_posterior_sigmas[i] is None
                        else repr(self.mean_posterior_sigmas[i]),
                    ]
                )


def _sample_categorical(probs: np.ndarray, rng: np.random.Generator) -> int:
    u = rng.random()
    acc = 0.0
    for i, p in enumerate(probs):
        acc += p
        if u < acc:
            return i
    return len(probs) - 1


def _train_tabular(
    method: str,
    cfg: TabularTrainConfig,
    model: TransitionModel,
    history: StateSeries,
    episode_cfg: EpisodeConfig,
    reward_params: RewardParams,
    seed: int,
) -> tuple[TabularPolicy, TrainingLog]:
    spec = make_discretizer(cfg.discretizer)
    grid = GRIDS[cfg.grid]
    table = QTable.create(spec.total_states, grid.n_actions)
    explore = agent_rng(seed)
    log = TrainingLog(method=method, seed=seed)

    for ep in range(cfg.episodes):
        rng = episode_rng(seed, ep)
        if cfg.epsilon_decay is not None:
            eps = epsilon_schedule(ep, cfg.episodes, *cfg.epsilon_decay)
        else:
            eps = cfg.epsilon
        state = env.reset(history, rng)
        s = encode(spec, state)
        a = epsilon_greedy(table.values[s], eps, explore) if cfg.algorithm == "sarsa" else -1
        ep_return = 0.0
        discount = 1.0
        for _ in range(episode_cfg.horizon):
            if cfg.algorithm == "q":
                a = epsilon_greedy(table.values[s], eps, explore)
            outcome = env.env_step(state, a, grid, model, episode_cfg, reward_params, rng)
            s_next = encode(spec, outcome.next_state)
            done = outcome.terminated
            if cfg.algorithm == "q":
                q_learning_update(table, s, a, outcome.reward, s_next, done, cfg.alpha, cfg.gamma)
            else:
                a_next = epsilon_greedy(table.values[s_next], eps, explore)
                sarsa_update(
                    table, s, a, outcome.reward, s_next, a_next, done, cfg.alpha, cfg.gamma
                )
                a = a_next
            ep_return += discount * outcome.reward
            discount *= cfg.gamma
            state = outcome.next_state
            s = s_next
            if done:
                break
        log.append(ep, ep_return, epsilon=eps)

    policy = TabularPolicy(table.values.copy(), spec, grid, method)
    return policy, log


def _train_bayes(
    method: str,
    cfg: BayesTrainConfig,
    model: TransitionModel,
    history: StateSeries,
    episode_cfg: EpisodeConfig,
    reward_params: RewardParams,
    seed: int,
) -> tuple[TabularPolicy, TrainingLog]:
    spec = make_discretizer(cfg.discretizer)
    grid = GRIDS[cfg.grid]
    post = GaussianQPosterior.create(
        spec.total_states,
        grid.n_actions,
        prior_mu=cfg.prior_mu,
        prior_variance=cfg.prior_variance,
        obs_noise_variance=cfg.obs_noise_variance,
    )
    explore = agent_rng(seed)
    log = TrainingLog(method=method, seed=seed)

    for ep in range(cfg.episodes):
        rng = episode_rng(seed, ep)
        state = env.reset(history, rng)
        s = encode(spec, state)
        ep_return = 0.0
        discount = 1.0
        for _ in range(episode_cfg.horizon):
            if cfg.selector == "thompson":
                a = thompson_select(post, s, explore)
            else:
                a = ucb_select(post, s, cfg.ucb_c)
            outcome = env.env_step(state, a, grid, model, episode_cfg, reward_params, rng)
            s_next = encode(spec, outcome.next_state)
            done = outcome.terminated
            target = outcome.reward + cfg.gamma * float(np.max(post.mu[s_next])) * (
                0.0 if done else 1.0
            )
            bayes_q_update(post, s, a, target)
            ep_return += discount * outcome.reward
            discount *= cfg.gamma
            state = outcome.next_state
            s = s_next
            if done:
                break
        log.append(ep, ep_return, mean_posterior_sigma=float(np.mean(np.sqrt(post.variance))))

    policy = TabularPolicy(
        post.mu.copy(), spec, grid, method, uncertainty=np.sqrt(post.variance)
    )
    return policy, log


def _train_actor_critic(
    method: str,
    cfg: ActorCriticTrainConfig,
    model: TransitionModel,
    history: StateSeries,
    episode_cfg: EpisodeConfig,
    reward_params: RewardParams,
    seed: int,
) -> tuple[ActorCriticPolicy, TrainingLog]:
    grid = GRIDS[cfg.grid]
    scaler = FeatureScaler.fit(history)
    ac = LinearActorCritic.create(grid.n_actions, scaler)
    explore = agent_rng(seed)
    log = TrainingLog(method=method, seed=seed)

    for ep in range(cfg.episodes):
        rng = episode_rng(seed, ep)
        state = env.reset(history, rng)
        feats = scaler.features(state)
        ep_return = 0.0
        discount = 1.0
        ep_feats: list[np.ndarray] = []
        ep_actions: list[int] = []
        ep_rewards: list[float] = []
        try:
            for _ in range(episode_cfg.horizon):
                probs = ac.policy_probs(feats)
                a = _sample_categorical(probs, explore)
                outcome = env.env_step(state, a, grid, model, episode_cfg, reward_params, rng)
                next_feats = scaler.features(outcome.next_state)
                done = outcome.terminated
                if cfg.reinforce_mode:
                    ep_feats.append(feats)
                    ep_actions.append(a)
                    ep_rewards.append(outcome.reward)
                else:
                    actor_critic_step(
                        ac, feats, a, outcome.reward, next_feats, done,
                        cfg.alpha_theta, cfg.alpha_w, cfg.gamma,
                    )
                ep_return += discount * outcome.reward
                discount *= cfg.gamma
                state = outcome.next_state
                feats = next_feats
                if done:
                    break
            if cfg.reinforce_mode and ep_rewards:
                reinforce_episode_update(
                    ac, ep_feats, ep_actions, ep_rewards,
                    cfg.alpha_theta, cfg.alpha_w, cfg.gamma,
                )
        except DivergenceError as exc:
            raise DivergenceError(f"{method}: episode {ep}: {exc}") from exc
        log.append(ep, ep_return)

    return ActorCriticPolicy(ac=ac, grid=grid, method=method), log


def _train_dqn(
    method: str,
    cfg: DqnTrainConfig,
    model: TransitionModel,
    history: StateSeries,
    episode_cfg: EpisodeConfig,
    reward_params: RewardParams,
    seed: int,
) -> tuple[DqnPolicy, TrainingLog]:
    grid = GRIDS[cfg.grid]
    scaler = FeatureScaler.fit(history)
    explore = agent_rng(seed)
    net = DqnNet.create(
        obs_dim=4,
        n_actions=grid.n_actions,
        rng=explore,
        hidden=cfg.hidden,
        buffer_capacity=cfg.buffer_capacity,
        lr=cfg.learning_rate,
        gamma=cfg.gamma,
    )
    log = TrainingLog(method=method, seed=seed)
    planned_steps = cfg.episodes * episode_cfg.horizon
    decay_steps = max(1, int(planned_steps * cfg.epsilon_decay_fraction))
    global_step = 0
    eps = cfg.epsilon_start

    for ep in range(cfg.episodes):
        rng = episode_rng(seed, ep)
        state = env.reset(history, rng)
        obs_vec = scaler.standardize(state)
        ep_return = 0.0
        discount = 1.0
        try:
            for _ in range(episode_cfg.horizon):
                frac = min(global_step / decay_steps, 1.0)
                eps = cfg.epsilon_start + (cfg.epsilon_end - cfg.epsilon_start) * frac
                if explore.random() < eps:
                    a = int(explore.integers(grid.n_actions))
                else:
                    a = int(np.argmax(net.online.predict(obs_vec.reshape(1, -1))[0]))
                outcome = env.env_step(state, a, grid, model, episode_cfg, reward_params, rng)
                next_vec = scaler.standardize(outcome.next_state)
                done = outcome.terminated
                net.buffer.add(obs_vec, a, outcome.reward, next_vec, done)
                global_step += 1
                net.env_steps = global_step
                if len(net.buffer) >= cfg.batch_size:
                    dqn_train_step(net, explore, cfg.batch_size)
                if global_step % cfg.target_sync_every == 0:
                    net.sync_target()
                ep_return += discount * outcome.reward
                discount *= cfg.gamma
                state = outcome.next_state
                obs_vec = next_vec
                if done:
                    break
        except DivergenceError as exc:
            raise DivergenceError(f"{method}: episode {ep}: {exc}") from exc
        log.append(ep, ep_return, epsilon=eps)

    return DqnPolicy(net=net.online, scaler=scaler, grid=grid, method=method), log


def train_agent(
    method: str,
    model: TransitionModel,
    history: StateSeries,
    episode_cfg: EpisodeConfig,
    reward_params: RewardParams,
    seed: int,
    episodes: int | None = None,
    config=None,
    overrides: dict | None = None,
):
    """Train one named method; returns (policy, training log).

    `episodes` and `overrides` adjust the registered defaults; `config`
    replaces them entirely.
    """
    registry = default_method_configs()
    if config is None:
        if method not in registry:
            raise ValueError(
                f"unknown method {method!r}; valid methods: {', '.join(METHOD_NAMES)} "
                f"(baselines {', '.join(BASELINE_NAMES)} need no training)"
            )
        config = registry[method]
    if overrides:
        config = override_config(config, overrides)
    if episodes is not None:
        config = dataclasses.replace(config, episodes=episodes)

    if isinstance(config, TabularTrainConfig):
        return _train_tabular(method, config, model, history, episode_cfg, reward_params, seed)
    if isinstance(config, BayesTrainConfig):
        return _train_bayes(method, config, model, history, episode_cfg, reward_params, seed)
    if isinstance(config, ActorCriticTrainConfig):
        return _train_actor_critic(
            method, config, model, history, episode_cfg, reward_params, seed
        )
    if isinstance(config, DqnTrainConfig):
        return _train_dqn(method, config, model, history, episode_cfg, reward_params, seed)
    raise TypeError(f"unsupported config type {type(config).__name__}")

