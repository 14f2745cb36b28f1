"""Gaussian posterior updates and exploration rules."""

import numpy as np
import pytest

from macrorl.agents.bayesian import (
    GaussianQPosterior,
    bayes_q_update,
    thompson_select,
    ucb_select,
)


def test_conjugate_update_hand_case():
    post = GaussianQPosterior.create(2, 2)
    bayes_q_update(post, 0, 0, -600.0)
    tau, tau_obs = 1 / 250_000.0, 1 / 100.0
    expected_mu = (tau_obs * -600.0) / (tau + tau_obs)
    expected_var = 1.0 / (tau + tau_obs)
    assert post.mu[0, 0] == pytest.approx(expected_mu, abs=1e-12)
    assert post.mu[0, 0] == pytest.approx(-599.76, abs=0.01)
    assert post.variance[0, 0] == pytest.approx(expected_var, abs=1e-12)
    assert post.variance[0, 0] == pytest.approx(99.96, abs=0.01)


def test_variance_strictly_decreases():
    post = GaussianQPosterior.create(1, 1)
    last = post.variance[0, 0]
    for _ in range(50):
        bayes_q_update(post, 0, 0, -5.0)
        assert post.variance[0, 0] < last
        last = post.variance[0, 0]


def test_two_updates_equal_one_double_weight():
    # Two same-target updates with noise v match one update with noise v/2.
    target = -42.0
    twice = GaussianQPosterior.create(1, 1)
    bayes_q_update(twice, 0, 0, target)
    bayes_q_update(twice, 0, 0, target)
    once = GaussianQPosterior.create(1, 1, obs_noise_variance=50.0)
    bayes_q_update(once, 0, 0, target)
    assert twice.mu[0, 0] == pytest.approx(once.mu[0, 0], rel=1e-12)
    assert twice.variance[0, 0] == pytest.approx(once.variance[0, 0], rel=1e-12)


def test_degenerate_posterior_reduces_to_argmax():
    post = GaussianQPosterior.create(1, 3)
    post.mu[0] = [-5.0, -1.0, -3.0]
    post.variance[0] = 1e-20
    rng = np.random.default_rng(0)
    assert ucb_select(post, 0) == 1
    assert all(thompson_select(post, 0, rng) == 1 for _ in range(100))


def test_ucb_prefers_uncertain_on_equal_means():
    post = GaussianQPosterior.create(1, 3)
    post.mu[0] = [-1.0, -1.0, -1.0]
    post.variance[0] = [1.0, 9.0, 1.0]
    assert ucb_select(post, 0) == 1


def test_ucb_ties_break_to_lowest_index():
    post = GaussianQPosterior.create(1, 3)
    post.mu[0] = [-1.0, -1.0, -2.0]
    post.variance[0] = [1.0, 1.0, 1.0]
    assert ucb_select(post, 0) == 0


def test_thompson_concentrates_on_clearly_better_arm():
    post = GaussianQPosterior.create(1, 2)
    post.mu[0] = [0.0, -10.0]
    post.variance[0] = [1.0, 1.0]
    rng = np.random.default_rng(8)
    picks = sum(thompson_select(post, 0, rng) == 0 for _ in range(10_000))
    # P(pick 0) = Phi(10 / sqrt(2)) ~ 1 - 7.7e-13
    assert picks >= 9_900


def test_posterior_monotone_under_mixed_targets():
    rng = np.random.default_rng(3)
    post = GaussianQPosterior.create(2, 2)
    last = post.variance.copy()
    for _ in range(200):
        s, a = int(rng.integers(2)), int(rng.integers(2))
        bayes_q_update(post, s, a, float(rng.normal(-500, 50)))
        assert np.all(post.variance <= last + 1e-15)
        last = post.variance.copy()
