"""Actor-critic updates and the log-policy gradient against finite differences."""

import numpy as np
import pytest

from macrorl.agents.actor_critic import (
    FeatureScaler,
    LinearActorCritic,
    actor_critic_step,
    log_policy_gradient,
    reinforce_episode_update,
)
from macrorl.environment import MacroState
from macrorl.errors import DivergenceError

from conftest import make_history


def make_ac(n_actions=3, seed=0):
    rng = np.random.default_rng(seed)
    history = make_history(rng.uniform(0, 8, size=(40, 4)))
    ac = LinearActorCritic.create(n_actions, FeatureScaler.fit(history))
    ac.theta += rng.normal(0, 0.3, size=ac.theta.shape)
    ac.w += rng.normal(0, 0.3, size=ac.w.shape)
    return ac


def test_probabilities_valid():
    ac = make_ac()
    rng = np.random.default_rng(1)
    for _ in range(200):
        feats = np.append(rng.normal(0, 2, size=4), 1.0)
        probs = ac.policy_probs(feats)
        assert abs(probs.sum() - 1.0) < 1e-12
        assert np.all(probs > 0)


def test_zero_td_error_changes_nothing():
    ac = make_ac()
    feats = np.array([0.5, -0.2, 1.0, 0.3, 1.0])
    # craft reward so that delta is exactly zero
    r = ac.value(feats) - 0.99 * ac.value(feats * 2)
    theta_before, w_before = ac.theta.copy(), ac.w.copy()
    delta = actor_critic_step(ac, feats, 0, r, feats * 2, done=False)
    assert delta == pytest.approx(0.0, abs=1e-15)
    assert np.array_equal(ac.theta, theta_before)
    assert np.array_equal(ac.w, w_before)


def test_positive_advantage_increases_action_probability():
    ac = make_ac()
    feats = np.array([0.5, -0.2, 1.0, 0.3, 1.0])
    p_before = ac.policy_probs(feats)[0]
    # large positive reward versus current value estimate -> delta > 0
    actor_critic_step(ac, feats, 0, ac.value(feats) + 10.0, feats, done=True)
    assert ac.policy_probs(feats)[0] > p_before


def test_log_policy_gradient_matches_finite_differences():
    ac = make_ac()
    rng = np.random.default_rng(2)
    h = 1e-5
    for _ in range(5):
        feats = np.append(rng.normal(0, 1.5, size=4), 1.0)
        action = int(rng.integers(3))
        analytic = log_policy_gradient(ac, feats, action)
        numeric = np.zeros_like(analytic)
        for i in range(analytic.shape[0]):
            for j in range(analytic.shape[1]):
                ac.theta[i, j] += h
                up = np.log(ac.policy_probs(feats)[action])
                ac.theta[i, j] -= 2 * h
                down = np.log(ac.policy_probs(feats)[action])
                ac.theta[i, j] += h
                numeric[i, j] = (up - down) / (2 * h)
        scale = np.maximum(np.abs(numeric), 1e-3)
        assert np.max(np.abs(analytic - numeric) / scale) < 1e-6


def test_divergence_raises():
    ac = make_ac()
    feats = np.array([0.5, -0.2, 1.0, 0.3, 1.0])
    with pytest.raises(DivergenceError):
        actor_critic_step(ac, feats, 0, float("nan"), feats, done=False)


def test_reinforce_update_moves_toward_better_action():
    ac = make_ac(seed=5)
    feats = np.array([0.1, 0.2, -0.1, 0.0, 1.0])
    p_before = ac.policy_probs(feats)[1]
    # single-step episode: action 1 got a reward far above baseline
    reinforce_episode_update(ac, [feats], [1], [ac.value(feats) + 5.0])
    assert ac.policy_probs(feats)[1] > p_before


def test_scaler_standardizes_history():
    rng = np.random.default_rng(9)
    history = make_history(rng.uniform(0, 10, size=(60, 4)))
    scaler = FeatureScaler.fit(history)
    standardized = (history.values - scaler.means) / scaler.stds
    assert np.allclose(standardized.mean(axis=0), 0.0, atol=1e-12)
    assert np.allclose(standardized.std(axis=0), 1.0, atol=1e-12)
    feats = scaler.features(MacroState(*history.values[0]))
    assert feats.shape == (5,)
    assert feats[4] == 1.0
