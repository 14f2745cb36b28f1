"""Shared fixtures: synthetic histories and hand-picked transition models."""

import numpy as np
import pytest

from macrorl.dynamics import TransitionModel
from macrorl.market_data import Quarter, StateSeries

# A stable, clearly non-trivial system used across fit-recovery tests.
STABLE_A = np.array(
    [
        [0.60, 0.10, 0.05],
        [0.05, 0.70, -0.10],
        [0.10, -0.20, 0.50],
    ]
)
STABLE_B = np.array([-0.10, 0.05, -0.08])


def make_history(values: np.ndarray, start=Quarter(1990, 1), gaps=()) -> StateSeries:
    """StateSeries over consecutive quarters, optionally skipping rows.

    `gaps` lists row positions after which one calendar quarter is
    skipped, producing a segment boundary.
    """
    quarters = []
    index = start.index
    for i in range(len(values)):
        quarters.append(Quarter.from_index(index))
        index += 2 if i in gaps else 1
    return StateSeries(quarters=tuple(quarters), values=np.asarray(values, dtype=float))


def simulate_history(
    A: np.ndarray,
    B: np.ndarray,
    n_rows: int,
    rng: np.random.Generator,
    c: np.ndarray | None = None,
    noise_L: np.ndarray | None = None,
    x0: np.ndarray | None = None,
    rate_range: tuple[float, float] = (0.0, 10.0),
) -> StateSeries:
    """Roll a known linear system forward to build a synthetic history."""
    c = np.zeros(3) if c is None else c
    rows = np.zeros((n_rows, 4))
    x = np.array([3.0, 5.0, 0.0]) if x0 is None else np.asarray(x0, dtype=float)
    for t in range(n_rows):
        rate = rng.uniform(*rate_range)
        rows[t, :3] = x
        rows[t, 3] = rate
        shock = noise_L @ rng.standard_normal(3) if noise_L is not None else 0.0
        x = A @ x + B * rate + c + shock
    return make_history(rows)


@pytest.fixture
def identity_model() -> TransitionModel:
    """No dynamics, no noise: the state is a fixed point under hold."""
    return TransitionModel.create(A=np.eye(3), B=np.zeros(3), Sigma=np.zeros((3, 3)))


@pytest.fixture
def stable_model() -> TransitionModel:
    sigma = np.diag([0.04, 0.02, 0.03])
    return TransitionModel.create(A=STABLE_A, B=STABLE_B, Sigma=sigma)


@pytest.fixture
def fixed_point_history() -> StateSeries:
    """Single historical row exactly at the reward targets."""
    return make_history(np.array([[2.0, 4.5, 0.0, 3.0]]))
