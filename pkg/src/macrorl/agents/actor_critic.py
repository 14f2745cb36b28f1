"""Linear softmax actor with a linear state-value critic.

Features are the four state variables standardized by historical
moments, plus a bias term. The critic learns by TD(0); the actor
ascends the policy gradient using the TD error as a baseline-corrected
advantage. A full-episode REINFORCE-with-baseline update is available
as an alternative mode.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..environment import MacroState
from ..errors import DivergenceError
from ..market_data import StateSeries


@dataclass(frozen=True)
class FeatureScaler:
    """Per-variable standardization fitted on the historical state rows."""

    means: np.ndarray  # (4,)
    stds: np.ndarray   # (4,)

    @staticmethod
    def fit(history: StateSeries) -> "FeatureScaler":
        means = history.values.mean(axis=0)
        stds = history.values.std(axis=0)
        stds = np.where(stds > 0, stds, 1.0)
        return FeatureScaler(means=means, stds=stds)

    def standardize(self, state: MacroState) -> np.ndarray:
        raw = np.array([state.inflation, state.unemployment, state.output_gap, state.rate])
        return (raw - self.means) / self.stds

    def features(self, state: MacroState) -> np.ndarray:
        """Standardized state with a trailing bias term."""
        out = np.empty(5)
        out[:4] = self.standardize(state)
        out[4] = 1.0
        return out


@dataclass
class LinearActorCritic:
    theta: np.ndarray  # (n_actions, n_features) policy weights
    w: np.ndarray      # (n_features,) value weights
    scaler: FeatureScaler

    @staticmethod
    def create(n_actions: int, scaler: FeatureScaler) -> "LinearActorCritic":
        n_features = 5
        return LinearActorCritic(
            theta=np.zeros((n_actions, n_features)),
            w=np.zeros(n_features),
            scaler=scaler,
        )

    def policy_probs(self, features: np.ndarray) -> np.ndarray:
        logits = self.theta @ features
        logits = logits - np.max(logits)
        exp = np.exp(logits)
        return exp / exp.sum()

    def value(self, features: np.ndarray) -> float:
        return float(self.w @ features)


def log_policy_gradient(
    ac: LinearActorCritic, features: np.ndarray, action: int
) -> np.ndarray:
    """Gradient of log pi(action | s) with respect to theta."""
    probs = ac.policy_probs(features)
    indicator = np.zeros_like(probs)
    indicator[action] = 1.0
    return np.outer(indicator - probs, features)


def actor_critic_step(
    ac: LinearActorCritic,
    features: np.ndarray,
    action: int,
    reward: float,
    next_features: np.ndarray,
    done: bool,
    alpha_theta: float = 1e-3,
    alpha_w: float = 1e-2,
    gamma: float = 0.99,
) -> float:
    """One TD actor-critic update; returns the TD error."""
    v = ac.value(features)
    v_next = 0.0 if done else ac.value(next_features)
    delta = reward + gamma * v_next - v
    if not np.isfinite(delta):
        raise DivergenceError(f"non-finite TD error {delta}")
    ac.w += alpha_w * delta * features
    ac.theta += alpha_theta * delta * log_policy_gradient(ac, features, action)
    return delta


def reinforce_episode_update(
    ac: LinearActorCritic,
    features: list[np.ndarray],
    actions: list[int],
    rewards: list[float],
    alpha_theta: float = 1e-3,
    alpha_w: float = 1e-2,
    gamma: float = 0.99,
) -> None:
    """Full-episode REINFORCE with the learned value as baseline."""
    returns = np.zeros(len(rewards))
    g = 0.0
    for t in reversed(range(len(rewards))):
        g = rewards[t] + gamma * g
        returns[t] = g
    discount = 1.0
    for t in range(len(rewards)):
        advantage = returns[t] - ac.value(features[t])
        if not np.isfinite(advantage):
            raise DivergenceError(f"non-finite advantage {advantage}")
        ac.w += alpha_w * advantage * features[t]
        ac.theta += alpha_theta * discount * advantage * log_policy_gradient(
            ac, features[t], actions[t]
        )
        discount *= gamma
