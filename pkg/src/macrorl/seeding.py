"""Deterministic random-stream derivation.

Every stochastic component draws from a generator derived from a base
seed plus fixed integer tags, so results never depend on scheduling or
worker count. Episode i always gets the stream (base_seed, EPISODE, i)
regardless of which thread runs it.
"""

import numpy as np

# Stream tags. Keep these stable: changing them changes every result.
EPISODE = 0
AGENT = 1
DATA = 2
EVAL = 3


def derived_rng(base_seed: int, *tags: int) -> np.random.Generator:
    """Generator for the stream identified by (base_seed, *tags)."""
    return np.random.default_rng(np.random.SeedSequence((base_seed, *tags)))


def episode_rng(base_seed: int, episode_index: int) -> np.random.Generator:
    """Independent stream for one episode; identical across schedules."""
    return derived_rng(base_seed, EPISODE, episode_index)


def agent_rng(base_seed: int) -> np.random.Generator:
    """Stream that drives an agent's own exploration randomness."""
    return derived_rng(base_seed, AGENT)


def eval_episode_rng(base_seed: int, episode_index: int) -> np.random.Generator:
    """Evaluation episodes live in their own tag space so they never
    replay the shocks seen in training."""
    return derived_rng(base_seed, EVAL, episode_index)
