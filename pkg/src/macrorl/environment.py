"""The monetary-policy decision environment.

A discrete-action MDP over four macro variables. The agent moves the
policy rate on a fixed grid of changes; (inflation, unemployment,
output gap) then evolve through the fitted transition model. Reward is
the negative quadratic dual-mandate loss plus a rate-smoothing penalty.
A partially observed variant perturbs the non-rate variables with
Gaussian noise; the rate itself is the agent's own instrument and is
always observed exactly.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Optional, Protocol, runtime_checkable

import numpy as np

from . import dynamics
from .dynamics import TransitionModel
from .market_data import StateSeries

RATE_MIN = 0.0
RATE_MAX = 20.0

TRACE_HEADER = [
    "step", "pi", "u", "y", "i", "action_delta", "reward",
    "inf_loss", "unemp_loss", "smooth_loss", "terminated",
]


class MacroState(NamedTuple):
    """One snapshot of the economy, all components in percent."""

    inflation: float
    unemployment: float
    output_gap: float
    rate: float

    def x(self) -> np.ndarray:
        """The endogenous block (inflation, unemployment, output gap)."""
        return np.array([self.inflation, self.unemployment, self.output_gap])


@dataclass(frozen=True)
class ActionGrid:
    """Ordered rate changes available to the agent, in percentage points."""

    deltas: tuple[float, ...]

    def __post_init__(self):
        if list(self.deltas) != sorted(self.deltas):
            raise ValueError("action deltas must be sorted ascending")
        if 0.0 not in self.deltas:
            raise ValueError("action grid must contain the hold action 0.0")
        mirrored = sorted(-d for d in self.deltas)
        if any(abs(a - b) > 1e-12 for a, b in zip(mirrored, self.deltas)):
            raise ValueError("action grid must be symmetric about 0")

    @property
    def n_actions(self) -> int:
        return len(self.deltas)

    @property
    def hold_index(self) -> int:
        return self.deltas.index(0.0)


STANDARD_GRID = ActionGrid((-0.5, 0.0, 0.5))
FIVE_ACTION_GRID = ActionGrid((-1.0, -0.5, 0.0, 0.5, 1.0))


@dataclass(frozen=True)
class RewardParams:
    """Dual-mandate loss weights and targets."""

    pi_star: float = 2.0
    u_star: float = 4.5
    w_pi: float = 1.0
    lambda_u: float = 0.5
    eta: float = 0.1

    def __post_init__(self):
        if min(self.w_pi, self.lambda_u, self.eta) < 0:
            raise ValueError("loss weights must be nonnegative")


@dataclass(frozen=True)
class EpisodeConfig:
    """Episode length, divergence bounds, and observation noise."""

    horizon: int = 80
    pi_bound: float = 25.0
    u_min: float = 0.0
    u_max: float = 30.0
    y_bound: float = 30.0
    observation_noise_sigma: float = 0.0

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be at least 1")
        if self.observation_noise_sigma < 0:
            raise ValueError("observation noise sigma must be nonnegative")


class LossComponents(NamedTuple):
    inflation: float
    unemployment: float
    smoothing: float


class StepOutcome(NamedTuple):
    next_state: MacroState
    reward: float
    loss_components: LossComponents
    terminated: bool
    truncated: bool


def reward(
    state_after: MacroState, realized_delta_i: float, params: RewardParams
) -> tuple[float, LossComponents]:
    """Quadratic dual-mandate reward, reported with its components.

    The reward is exactly the negated sum of the three components, so
    bookkeeping downstream can rely on the identity holding bitwise.
    """
    components = LossComponents(
        inflation=params.w_pi * (state_after.inflation - params.pi_star) ** 2,
        unemployment=params.lambda_u * (state_after.unemployment - params.u_star) ** 2,
        smoothing=params.eta * realized_delta_i**2,
    )
    return -(components[0] + components[1] + components[2]), components


def reset(history: StateSeries, rng: np.random.Generator) -> MacroState:
    """Draw an initial state uniformly from the historical rows."""
    if len(history) == 0:
        raise ValueError("cannot sample an initial state from an empty history")
    row = history.values[int(rng.integers(len(history)))]
    rate = min(max(float(row[3]), RATE_MIN), RATE_MAX)
    return MacroState(float(row[0]), float(row[1]), float(row[2]), rate)


def _diverged(state: MacroState, cfg: EpisodeConfig) -> bool:
    return (
        abs(state.inflation) > cfg.pi_bound
        or state.unemployment < cfg.u_min
        or state.unemployment > cfg.u_max
        or abs(state.output_gap) > cfg.y_bound
    )


def env_step(
    state: MacroState,
    action_index: int,
    grid: ActionGrid,
    model: TransitionModel,
    cfg: EpisodeConfig,
    params: RewardParams,
    rng: np.random.Generator,
) -> StepOutcome:
    """Apply one rate decision and simulate the economy's response.

    The new rate is clamped to [0, 20], and the smoothing penalty uses
    the realized change, which may be smaller than the nominal action at
    the bounds.
    """
    if not 0 <= action_index < grid.n_actions:
        raise ValueError(f"action index {action_index} out of range for {grid.n_actions} actions")
    new_rate = min(max(state.rate + grid.deltas[action_index], RATE_MIN), RATE_MAX)
    realized_delta = new_rate - state.rate
    x_next = dynamics.step(model, state.x(), new_rate, rng)
    next_state = MacroState(float(x_next[0]), float(x_next[1]), float(x_next[2]), new_rate)
    r, components = reward(next_state, realized_delta, params)
    return StepOutcome(next_state, r, components, _diverged(next_state, cfg), False)


def observe(
    state: MacroState, cfg: EpisodeConfig, rng: np.random.Generator
) -> MacroState:
    """Noisy view of the state; the rate is always reported exactly.

    With sigma = 0 the input is returned unchanged (and no randomness is
    consumed), so the fully observed case is recovered bitwise.
    """
    sigma = cfg.observation_noise_sigma
    if sigma == 0.0:
        return state
    noise = rng.standard_normal(3) * sigma
    return MacroState(
        state.inflation + float(noise[0]),
        state.unemployment + float(noise[1]),
        state.output_gap + float(noise[2]),
        state.rate,
    )


@runtime_checkable
class Policy(Protocol):
    """Anything that maps an observed state to an action index."""

    def select_action(self, obs: MacroState, rng: np.random.Generator) -> int: ...


@dataclass
class EpisodeTrace:
    """Everything one episode produced, step by step."""

    states: list[MacroState] = field(default_factory=list)  # initial state first
    actions: list[int] = field(default_factory=list)
    realized_deltas: list[float] = field(default_factory=list)
    rewards: list[float] = field(default_factory=list)
    loss_components: list[LossComponents] = field(default_factory=list)
    terminated: bool = False
    truncated: bool = False

    def __len__(self) -> int:
        return len(self.rewards)


def run_episode(
    policy: Policy,
    model: TransitionModel,
    history: StateSeries,
    grid: ActionGrid,
    cfg: EpisodeConfig,
    params: RewardParams,
    rng: np.random.Generator,
) -> EpisodeTrace:
    """Play one episode to termination, divergence, or the horizon.

    The single rng stream drives the initial draw, observation noise,
    policy randomness, and shocks in a fixed order, so a seeded stream
    reproduces the episode exactly.
    """
    trace = EpisodeTrace()
    state = reset(history, rng)
    trace.states.append(state)
    begin = getattr(policy, "begin_episode", None)
    if begin is not None:
        begin(rng)

    for step_index in range(cfg.horizon):
        obs = observe(state, cfg, rng)
        action = policy.select_action(obs, rng)
        outcome = env_step(state, action, grid, model, cfg, params, rng)
        trace.states.append(outcome.next_state)
        trace.actions.append(action)
        trace.realized_deltas.append(outcome.next_state.rate - state.rate)
        trace.rewards.append(outcome.reward)
        trace.loss_components.append(outcome.loss_components)
        state = outcome.next_state
        if outcome.terminated:
            trace.terminated = True
            break
    else:
        trace.truncated = True
    return trace


def write_trace_csv(trace: EpisodeTrace, path: str | Path) -> None:
    """Export an episode as CSV, one row per step after the initial state."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_HEADER)
        for t in range(len(trace)):
            s = trace.states[t + 1]
            comps = trace.loss_components[t]
            terminated = trace.terminated and t == len(trace) - 1
            writer.writerow(
                [
                    t,
                    repr(s.inflation),
                    repr(s.unemployment),
                    repr(s.output_gap),
                    repr(s.rate),
                    repr(trace.realized_deltas[t]),
                    repr(trace.rewards[t]),
                    repr(comps.inflation),
                    repr(comps.unemployment),
                    repr(comps.smoothing),
                    int(terminated),
                ]
            )
