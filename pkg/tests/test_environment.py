"""Reward arithmetic, stepping, clamping, observation noise, episode driver."""

import numpy as np
import pytest

from macrorl.dynamics import TransitionModel
from macrorl.environment import (
    FIVE_ACTION_GRID,
    STANDARD_GRID,
    ActionGrid,
    EpisodeConfig,
    MacroState,
    RewardParams,
    env_step,
    observe,
    reset,
    reward,
    run_episode,
    write_trace_csv,
)
from macrorl.agents.baselines import HoldPolicy

from conftest import make_history

PARAMS = RewardParams()
CFG = EpisodeConfig()


# ---------------------------------------------------------------------------
# reward
# ---------------------------------------------------------------------------


def test_reward_at_targets_is_zero():
    r, comps = reward(MacroState(2.0, 4.5, 0.0, 3.0), 0.0, PARAMS)
    assert r == 0.0
    assert comps == (0.0, 0.0, 0.0)


def test_reward_one_point_inflation_miss():
    r, _ = reward(MacroState(3.0, 4.5, 0.0, 3.0), 0.0, PARAMS)
    assert r == -1.0


def test_reward_hand_case():
    r, comps = reward(MacroState(4.0, 6.5, 1.0, 3.0), 0.5, PARAMS)
    assert r == pytest.approx(-6.025, abs=1e-12)
    assert comps.inflation == pytest.approx(4.0, abs=1e-12)
    assert comps.unemployment == pytest.approx(2.0, abs=1e-12)
    assert comps.smoothing == pytest.approx(0.025, abs=1e-12)


def test_reward_nonpositive_and_components_sum():
    rng = np.random.default_rng(1)
    for _ in range(500):
        state = MacroState(*rng.uniform(-10, 15, size=3), rng.uniform(0, 20))
        delta = rng.uniform(-1, 1)
        r, comps = reward(state, delta, PARAMS)
        assert r <= 0.0
        assert comps.inflation + comps.unemployment + comps.smoothing == -r
        assert min(comps) >= 0.0


def test_reward_zero_iff_targets_met():
    r, _ = reward(MacroState(2.0, 4.5, 7.0, 3.0), 0.0, PARAMS)
    assert r == 0.0  # output gap is not penalized directly
    r, _ = reward(MacroState(2.0, 4.6, 0.0, 3.0), 0.0, PARAMS)
    assert r < 0.0


# ---------------------------------------------------------------------------
# reset / observe
# ---------------------------------------------------------------------------


def test_reset_single_row(fixed_point_history):
    for seed in range(5):
        state = reset(fixed_point_history, np.random.default_rng(seed))
        assert state == MacroState(2.0, 4.5, 0.0, 3.0)


def test_reset_determinism(fixed_point_history):
    history = make_history(np.random.default_rng(0).uniform(0, 8, size=(50, 4)))
    a = reset(history, np.random.default_rng(4))
    b = reset(history, np.random.default_rng(4))
    assert a == b


def test_reset_uniform_over_rows():
    rows = np.array(
        [
            [1.0, 4.0, 0.0, 1.0],
            [2.0, 5.0, 1.0, 2.0],
            [3.0, 6.0, -1.0, 3.0],
            [4.0, 7.0, 2.0, 4.0],
        ]
    )
    history = make_history(rows)
    rng = np.random.default_rng(2024)
    counts = {i: 0 for i in range(4)}
    n = 10_000
    for _ in range(n):
        state = reset(history, rng)
        counts[int(state.inflation) - 1] += 1
    for i in range(4):
        assert abs(counts[i] / n - 0.25) < 0.02


def test_reset_clamps_rate():
    history = make_history(np.array([[2.0, 4.5, 0.0, 25.0]]))
    state = reset(history, np.random.default_rng(0))
    assert state.rate == 20.0


def test_observe_sigma_zero_is_identity(fixed_point_history):
    state = MacroState(3.1, 5.2, -0.4, 2.5)
    assert observe(state, EpisodeConfig(observation_noise_sigma=0.0), np.random.default_rng(1)) is state


def test_observe_determinism():
    cfg = EpisodeConfig(observation_noise_sigma=0.15)
    state = MacroState(3.0, 5.0, 0.0, 2.0)
    a = observe(state, cfg, np.random.default_rng(12))
    b = observe(state, cfg, np.random.default_rng(12))
    assert a == b
    assert a.rate == state.rate  # rate is exact


def test_observe_noise_scale():
    cfg = EpisodeConfig(observation_noise_sigma=0.15)
    state = MacroState(3.0, 5.0, 0.0, 2.0)
    rng = np.random.default_rng(5)
    samples = np.array([observe(state, cfg, rng)[:3] for _ in range(10_000)])
    stds = samples.std(axis=0)
    assert np.all(np.abs(stds - 0.15) < 0.005)


# ---------------------------------------------------------------------------
# env_step
# ---------------------------------------------------------------------------


def test_fixed_point_hold(identity_model):
    state = MacroState(2.0, 4.5, 0.0, 3.0)
    outcome = env_step(
        state, STANDARD_GRID.hold_index, STANDARD_GRID, identity_model, CFG, PARAMS,
        np.random.default_rng(0),
    )
    assert outcome.next_state == state
    assert outcome.reward == 0.0
    assert not outcome.terminated


def test_clamp_at_lower_bound(identity_model):
    state = MacroState(2.0, 4.5, 0.0, 0.2)
    outcome = env_step(state, 0, STANDARD_GRID, identity_model, CFG, PARAMS,
                       np.random.default_rng(0))
    assert outcome.next_state.rate == 0.0
    realized = outcome.next_state.rate - state.rate
    assert realized == pytest.approx(-0.2, abs=1e-12)
    assert outcome.loss_components.smoothing == pytest.approx(0.1 * 0.2**2, abs=1e-12)


def test_rate_never_leaves_bounds(identity_model):
    rng = np.random.default_rng(8)
    state = MacroState(2.0, 4.5, 0.0, 19.9)
    for _ in range(200):
        action = int(rng.integers(FIVE_ACTION_GRID.n_actions))
        outcome = env_step(state, action, FIVE_ACTION_GRID, identity_model, CFG, PARAMS, rng)
        assert 0.0 <= outcome.next_state.rate <= 20.0
        state = outcome.next_state


def test_invalid_action_rejected(identity_model):
    state = MacroState(2.0, 4.5, 0.0, 3.0)
    with pytest.raises(ValueError):
        env_step(state, 3, STANDARD_GRID, identity_model, CFG, PARAMS, np.random.default_rng(0))
    with pytest.raises(ValueError):
        env_step(state, -1, STANDARD_GRID, identity_model, CFG, PARAMS, np.random.default_rng(0))


def test_divergence_triggers_termination():
    # A huge intercept forces inflation past the bound in one step.
    model = TransitionModel.create(
        A=np.eye(3), B=np.zeros(3), Sigma=np.zeros((3, 3)), c=np.array([30.0, 0.0, 0.0])
    )
    state = MacroState(2.0, 4.5, 0.0, 3.0)
    outcome = env_step(state, 1, STANDARD_GRID, model, CFG, PARAMS, np.random.default_rng(0))
    assert outcome.next_state.inflation == 32.0
    assert outcome.terminated


# ---------------------------------------------------------------------------
# episode driver
# ---------------------------------------------------------------------------


def test_episode_length_capped(stable_model, fixed_point_history):
    policy = HoldPolicy(STANDARD_GRID)
    trace = run_episode(
        policy, stable_model, fixed_point_history, STANDARD_GRID, CFG, PARAMS,
        np.random.default_rng(1),
    )
    assert len(trace) <= CFG.horizon
    assert trace.truncated or trace.terminated


def test_fixed_point_episode_returns_zero(identity_model, fixed_point_history):
    policy = HoldPolicy(STANDARD_GRID)
    trace = run_episode(
        policy, identity_model, fixed_point_history, STANDARD_GRID, CFG, PARAMS,
        np.random.default_rng(1),
    )
    assert len(trace) == 80
    assert trace.truncated and not trace.terminated
    discounted = sum(0.99**t * r for t, r in enumerate(trace.rewards))
    assert discounted == 0.0


def test_early_termination_on_divergence(fixed_point_history):
    model = TransitionModel.create(
        A=np.eye(3), B=np.zeros(3), Sigma=np.zeros((3, 3)), c=np.array([30.0, 0.0, 0.0])
    )
    policy = HoldPolicy(STANDARD_GRID)
    trace = run_episode(
        policy, model, fixed_point_history, STANDARD_GRID, CFG, PARAMS,
        np.random.default_rng(1),
    )
    assert trace.terminated and not trace.truncated
    assert len(trace) == 1


def test_trace_csv_columns(tmp_path, identity_model, fixed_point_history):
    policy = HoldPolicy(STANDARD_GRID)
    trace = run_episode(
        policy, identity_model, fixed_point_history, STANDARD_GRID, CFG, PARAMS,
        np.random.default_rng(1),
    )
    path = tmp_path / "trace.csv"
    write_trace_csv(trace, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "step,pi,u,y,i,action_delta,reward,inf_loss,unemp_loss,smooth_loss,terminated"
    assert len(lines) == 1 + len(trace)


# ---------------------------------------------------------------------------
# grids
# ---------------------------------------------------------------------------


def test_grid_validation():
    with pytest.raises(ValueError):
        ActionGrid((0.5, 0.0, -0.5))  # unsorted
    with pytest.raises(ValueError):
        ActionGrid((-0.5, 0.5))  # missing hold
    with pytest.raises(ValueError):
        ActionGrid((-1.0, 0.0, 0.5))  # asymmetric
    assert STANDARD_GRID.hold_index == 1
    assert FIVE_ACTION_GRID.hold_index == 2
