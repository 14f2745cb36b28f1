"""Tabular Q-learning and SARSA primitives.

Tables are dense (states x actions) arrays initialized to zero, which
is optimistic here because every reward is nonpositive: unvisited cells
look good until tried, giving systematic exploration on top of the
epsilon-greedy draw.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass
class QTable:
    values: np.ndarray        # (n_states, n_actions) float
    visit_counts: np.ndarray  # (n_states, n_actions) int

    @staticmethod
    def create(n_states: int, n_actions: int) -> "QTable":
        return QTable(
            values=np.zeros((n_states, n_actions)),
            visit_counts=np.zeros((n_states, n_actions), dtype=np.int64),
        )

    def check_indices(self, s: int, a: int) -> None:
        n_states, n_actions = self.values.shape
        if not (0 <= s < n_states and 0 <= a < n_actions):
            raise IndexError(f"(state {s}, action {a}) out of range for table {self.values.shape}")


def q_learning_update(
    table: QTable,
    s: int,
    a: int,
    r: float,
    s_next: int,
    done: bool,
    alpha: float = 0.1,
    gamma: float = 0.99,
) -> QTable:
    """Off-policy TD(0) update toward r + gamma * max_a' Q(s', a')."""
    table.check_indices(s, a)
    table.check_indices(s_next, 0)
    target = r + gamma * float(np.max(table.values[s_next])) * (0.0 if done else 1.0)
    table.values[s, a] += alpha * (target - table.values[s, a])
    table.visit_counts[s, a] += 1
    return table


def sarsa_update(
    table: QTable,
    s: int,
    a: int,
    r: float,
    s_next: int,
    a_next: int,
    done: bool,
    alpha: float = 0.1,
    gamma: float = 0.99,
) -> QTable:
    """On-policy TD(0) update toward r + gamma * Q(s', a_next)."""
    table.check_indices(s, a)
    table.check_indices(s_next, a_next)
    target = r + gamma * float(table.values[s_next, a_next]) * (0.0 if done else 1.0)
    table.values[s, a] += alpha * (target - table.values[s, a])
    table.visit_counts[s, a] += 1
    return table


def epsilon_greedy(values: np.ndarray, epsilon: float, rng: np.random.Generator | None) -> int:
    """Greedy with probability 1 - epsilon, else uniform over all actions.

    Ties break to the lowest index. With epsilon 0 no randomness is
    consumed, so rng may be None for pure greedy use.
    """
    if epsilon > 0:
        if rng is None:
            raise ValueError("epsilon > 0 requires an rng")
        if rng.random() < epsilon:
            return int(rng.integers(len(values)))
    return int(np.argmax(values))


def epsilon_schedule(
    episode: int, total_episodes: int, start: float = 0.9, end: float = 0.01
) -> float:
    """Exponential decay end + (start - end) * exp(-5 k / total)."""
    if total_episodes <= 0:
        return end
    return end + (start - end) * math.exp(-5.0 * episode / total_episodes)
