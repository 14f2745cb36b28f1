"""Particle-filter belief over the hidden macro variables.

Under observation noise the agent never sees (inflation, unemployment,
output gap) exactly; the rate is its own instrument and is known. A
fixed population of particles is propagated through the transition
model with the set rate, reweighted by the Gaussian observation
likelihood, and systematically resampled when the effective sample size
drops below half the population. Discrete agents then act on the
weighted mean of the belief.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .dynamics import TransitionModel
from .environment import MacroState
from .market_data import StateSeries

N_PARTICLES = 1000
RESAMPLE_ESS_THRESHOLD = 0.5 * N_PARTICLES
WEIGHT_UNDERFLOW = 1e-300
DEFAULT_OBS_SIGMA = 0.15


@dataclass(frozen=True)
class ParticleSet:
    """Weighted hypotheses about the hidden (pi, u, y) block."""

    particles: np.ndarray  # (N_PARTICLES, 3)
    weights: np.ndarray    # (N_PARTICLES,), nonnegative, sums to 1
    known_rate: float

    def __post_init__(self):
        if self.particles.shape != (N_PARTICLES, 3):
            raise ValueError(f"expected ({N_PARTICLES}, 3) particles, got {self.particles.shape}")
        if self.weights.shape != (N_PARTICLES,):
            raise ValueError("weights must match the particle count")
        if abs(float(self.weights.sum()) - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1")


class PfStepInfo(NamedTuple):
    ess: float               # effective sample size before any resampling
    resampled: bool
    weight_underflow: bool   # total likelihood underflowed; weights were reset


def effective_sample_size(weights: np.ndarray) -> float:
    return float(1.0 / np.sum(weights**2))


def pf_init(history: StateSeries, rng: np.random.Generator, known_rate: float = 0.0) -> ParticleSet:
    """Particles drawn uniformly from historical (pi, u, y) rows."""
    if len(history) == 0:
        raise ValueError("cannot initialize particles from an empty history")
    idx = rng.integers(0, len(history), size=N_PARTICLES)
    return ParticleSet(
        particles=history.values[idx, :3].copy(),
        weights=np.full(N_PARTICLES, 1.0 / N_PARTICLES),
        known_rate=known_rate,
    )


def systematic_resample(weights: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Indices of the survivors under systematic (low-variance) resampling."""
    n = len(weights)
    positions = (rng.random() + np.arange(n)) / n
    cumulative = np.cumsum(weights)
    cumulative[-1] = 1.0  # guard against round-off exceeding the last edge
    return np.searchsorted(cumulative, positions)


def pf_step(
    belief: ParticleSet,
    rate_set: float,
    observation: np.ndarray,
    model: TransitionModel,
    sigma_obs: float = DEFAULT_OBS_SIGMA,
    rng: np.random.Generator | None = None,
) -> tuple[ParticleSet, PfStepInfo]:
    """Propagate, reweight against a noisy (pi, u, y) observation, and
    resample if the weights have degenerated.

    If the total observation likelihood underflows (all particles
    essentially impossible), weights reset to uniform and the event is
    flagged rather than raising.
    """
    if rng is None:
        raise ValueError("pf_step requires an rng")
    observation = np.asarray(observation, dtype=float).reshape(3)

    noise = rng.standard_normal((N_PARTICLES, 3)) @ model.cholesky_L.T
    propagated = belief.particles @ model.A.T + model.B * rate_set + model.c + noise

    underflow = False
    if sigma_obs > 0 and np.isfinite(sigma_obs):
        sq = np.sum((observation - propagated) ** 2, axis=1)
        likelihood = np.exp(-0.5 * sq / sigma_obs**2)
        raw = belief.weights * likelihood
        total = float(raw.sum())
        underflow = total < WEIGHT_UNDERFLOW
        if underflow:
            weights = np.full(N_PARTICLES, 1.0 / N_PARTICLES)
        else:
            weights = raw / total
    else:
        # Uninformative observation: the Bayes update is a no-op, so the
        # weights carry over bit-exactly.
        weights = belief.weights.copy()

    ess = effective_sample_size(weights)
    resampled = ess < RESAMPLE_ESS_THRESHOLD
    if resampled:
        survivors = systematic_resample(weights, rng)
        propagated = propagated[survivors]
        weights = np.full(N_PARTICLES, 1.0 / N_PARTICLES)

    new_belief = ParticleSet(particles=propagated, weights=weights, known_rate=rate_set)
    return new_belief, PfStepInfo(ess=ess, resampled=resampled, weight_underflow=underflow)


def belief_mean(belief: ParticleSet) -> MacroState:
    """Weighted particle average assembled with the known rate."""
    mean = belief.weights @ belief.particles
    return MacroState(float(mean[0]), float(mean[1]), float(mean[2]), belief.known_rate)


def belief_std(belief: ParticleSet) -> np.ndarray:
    mean = belief.weights @ belief.particles
    var = belief.weights @ (belief.particles - mean) ** 2
    return np.sqrt(var)


class BeliefFilterPolicy:
    """Adapter that feeds any discrete policy the belief mean.

    The wrapped policy sees a point state: the filtered (pi, u, y) plus
    the exactly observed rate. One instance carries per-episode filter
    state; evaluation clones it for each episode.
    """

    def __init__(
        self,
        inner,
        model: TransitionModel,
        history: StateSeries,
        sigma_obs: float = DEFAULT_OBS_SIGMA,
    ):
        self.inner = inner
        self.model = model
        self.history = history
        self.sigma_obs = sigma_obs
        self.belief: ParticleSet | None = None
        self.steps_info: list[PfStepInfo] = []
        self._awaiting_first_obs = True

    @property
    def method(self) -> str:
        return getattr(self.inner, "method", type(self.inner).__name__)

    def clone(self) -> "BeliefFilterPolicy":
        return BeliefFilterPolicy(self.inner, self.model, self.history, self.sigma_obs)

    def begin_episode(self, rng: np.random.Generator) -> None:
        self.belief = pf_init(self.history, rng)
        self.steps_info = []
        self._awaiting_first_obs = True

    def select_action(self, obs: MacroState, rng: np.random.Generator) -> int:
        if self.belief is None:
            raise RuntimeError("begin_episode must run before select_action")
        if self._awaiting_first_obs:
            # No transition has happened yet; just adopt the known rate.
            self.belief = replace(self.belief, known_rate=obs.rate)
            self._awaiting_first_obs = False
        else:
            self.belief, info = pf_step(
                self.belief, obs.rate, np.array(obs[:3]), self.model, self.sigma_obs, rng
            )
            self.steps_info.append(info)
        return self.inner.select_action(belief_mean(self.belief), rng)


def write_belief_trace_csv(
    means: list[MacroState], stds: list[np.ndarray], esses: list[float], path: str | Path
) -> None:
    """Belief trajectory as CSV: step, mean, per-component std, ESS."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["step", "pi_mean", "u_mean", "y_mean", "pi_std", "u_std", "y_std", "ess"]
        )
        for t, (mean, std, ess) in enumerate(zip(means, stds, esses)):
            writer.writerow(
                [
                    t,
                    repr(mean.inflation),
                    repr(mean.unemployment),
                    repr(mean.output_gap),
                    repr(float(std[0])),
                    repr(float(std[1])),
                    repr(float(std[2])),
                    repr(ess),
                ]
            )
