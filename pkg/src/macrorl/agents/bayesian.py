"""Bayesian Q-values with per-cell Gaussian posteriors.

Each (state, action) cell keeps an independent conjugate Gaussian
posterior over its Q-value, updated against bootstrapped targets with
known observation noise. Action selection is either Thompson sampling
(draw one value per action, take the best) or UCB on the posterior
mean plus scaled standard deviation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_PRIOR_MU = 0.0
DEFAULT_PRIOR_VARIANCE = 250_000.0  # sigma_0 = 500, spans the return scale
DEFAULT_OBS_NOISE_VARIANCE = 100.0  # sigma_obs = 10 reward units


@dataclass
class GaussianQPosterior:
    mu: np.ndarray        # (n_states, n_actions)
    variance: np.ndarray  # (n_states, n_actions), strictly positive
    obs_noise_variance: float = DEFAULT_OBS_NOISE_VARIANCE

    @staticmethod
    def create(
        n_states: int,
        n_actions: int,
        prior_mu: float = DEFAULT_PRIOR_MU,
        prior_variance: float = DEFAULT_PRIOR_VARIANCE,
        obs_noise_variance: float = DEFAULT_OBS_NOISE_VARIANCE,
    ) -> "GaussianQPosterior":
        if prior_variance <= 0 or obs_noise_variance <= 0:
            raise ValueError("variances must be strictly positive")
        return GaussianQPosterior(
            mu=np.full((n_states, n_actions), prior_mu, dtype=float),
            variance=np.full((n_states, n_actions), prior_variance, dtype=float),
            obs_noise_variance=obs_noise_variance,
        )


def bayes_q_update(
    post: GaussianQPosterior, s: int, a: int, target_value: float
) -> GaussianQPosterior:
    """Conjugate known-noise update of one cell toward a bootstrapped target."""
    tau = 1.0 / post.variance[s, a]
    tau_obs = 1.0 / post.obs_noise_variance
    post.mu[s, a] = (tau * post.mu[s, a] + tau_obs * target_value) / (tau + tau_obs)
    post.variance[s, a] = 1.0 / (tau + tau_obs)
    return post


def thompson_select(post: GaussianQPosterior, s: int, rng: np.random.Generator) -> int:
    """Sample one plausible Q-value per action, act on the best draw."""
    draws = post.mu[s] + np.sqrt(post.variance[s]) * rng.standard_normal(post.mu.shape[1])
    return int(np.argmax(draws))


def ucb_select(post: GaussianQPosterior, s: int, c: float = 2.0) -> int:
    """Optimism bonus of c posterior standard deviations; ties to lowest index."""
    return int(np.argmax(post.mu[s] + c * np.sqrt(post.variance[s])))
