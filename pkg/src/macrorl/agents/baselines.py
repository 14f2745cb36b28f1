"""Rule-based policy benchmarks: Taylor rules and naive hold."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..environment import RATE_MAX, RATE_MIN, ActionGrid, MacroState


@dataclass(frozen=True)
class TaylorParams:
    """Coefficients of the prescriptive rate rule.

    r_star is the equilibrium real rate; 2.0 is the conventional value.
    """

    r_star: float = 2.0
    phi_pi: float = 0.5
    phi_y: float = 0.5


TAYLOR_STANDARD = TaylorParams(r_star=2.0, phi_pi=0.5, phi_y=0.5)
TAYLOR_TUNED = TaylorParams(r_star=2.0, phi_pi=1.5, phi_y=0.5)


def taylor_rate(state: MacroState, params: TaylorParams, pi_star: float = 2.0) -> float:
    """Prescribed rate: r* + pi + phi_pi (pi - pi*) + phi_y y."""
    return (
        params.r_star
        + state.inflation
        + params.phi_pi * (state.inflation - pi_star)
        + params.phi_y * state.output_gap
    )


def taylor_action(
    state: MacroState,
    params: TaylorParams,
    grid: ActionGrid,
    pi_star: float = 2.0,
) -> int:
    """Grid action whose clamped result lands closest to the prescribed
    rate; ties prefer the smaller move."""
    target = taylor_rate(state, params, pi_star)
    best_index = 0
    best_key: tuple[float, float] | None = None
    for index, delta in enumerate(grid.deltas):
        achieved = min(max(state.rate + delta, RATE_MIN), RATE_MAX)
        key = (abs(achieved - target), abs(delta))
        if best_key is None or key < best_key:
            best_key = key
            best_index = index
    return best_index


def hold_action(grid: ActionGrid) -> int:
    """Index of the do-nothing action."""
    return grid.hold_index


@dataclass(frozen=True)
class TaylorPolicy:
    params: TaylorParams
    grid: ActionGrid
    pi_star: float = 2.0

    def select_action(self, obs: MacroState, rng: np.random.Generator | None = None) -> int:
        return taylor_action(obs, self.params, self.grid, self.pi_star)


@dataclass(frozen=True)
class HoldPolicy:
    grid: ActionGrid

    def select_action(self, obs: MacroState, rng: np.random.Generator | None = None) -> int:
        return self.grid.hold_index
