"""Benchmark evaluation protocol and statistical comparison reports.

Each policy is rolled out for a fixed number of exploration-free
episodes. Per-episode randomness is derived from (base_seed, episode
index), so results are identical no matter how episodes are scheduled
across worker threads. Summaries, pairwise effect sizes, and raw
episode rows are emitted as CSV, plus a machine-readable run manifest.
"""

from __future__ import annotations

import csv
import json
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import stats as _stats

from .dynamics import TransitionModel
from .environment import (
    ActionGrid,
    EpisodeConfig,
    EpisodeTrace,
    LossComponents,
    Policy,
    RewardParams,
    run_episode,
)
from .market_data import StateSeries
from .seeding import eval_episode_rng

DEFAULT_GAMMA = 0.99
DEFAULT_EVAL_EPISODES = 200

SUMMARY_HEADER = ["method", "mean_return", "std_return", "mean_loss"]


def discount_sum(gamma: float, n_steps: int) -> float:
    """Sum of gamma^t for t in [0, n_steps); 55.2477 for (0.99, 80)."""
    if gamma == 1.0:
        return float(n_steps)
    return (1.0 - gamma**n_steps) / (1.0 - gamma)


@dataclass(frozen=True)
class EpisodeResult:
    discounted_return: float
    mean_step_loss: float
    component_means: LossComponents
    length: int
    terminated: bool
    episode_index: int

    def __post_init__(self):
        if self.discounted_return > 1e-12:
            raise ValueError("discounted return must be nonpositive")


def episode_result_from_trace(
    trace: EpisodeTrace, gamma: float, episode_index: int
) -> EpisodeResult:
    rewards = np.asarray(trace.rewards)
    discounts = gamma ** np.arange(len(rewards))
    comps = np.asarray(trace.loss_components)  # (n, 3)
    return EpisodeResult(
        discounted_return=float(discounts @ rewards),
        mean_step_loss=float(np.mean(-rewards)),
        component_means=LossComponents(*(float(v) for v in comps.mean(axis=0))),
        length=len(rewards),
        terminated=trace.terminated,
        episode_index=episode_index,
    )


def evaluate_policy(
    policy: Policy,
    model: TransitionModel,
    history: StateSeries,
    grid: ActionGrid,
    cfg: EpisodeConfig,
    params: RewardParams,
    n_episodes: int = DEFAULT_EVAL_EPISODES,
    base_seed: int = 0,
    gamma: float = DEFAULT_GAMMA,
    n_workers: int = 1,
) -> list[EpisodeResult]:
    """Greedy rollouts with per-episode seeding.

    Stateful policies (anything exposing ``clone``) get a fresh clone
    per episode so worker threads never share mutable state.
    """

    def one_episode(index: int) -> EpisodeResult:
        rng = eval_episode_rng(base_seed, index)
        p = policy.clone() if hasattr(policy, "clone") else policy
        trace = run_episode(p, model, history, grid, cfg, params, rng)
        return episode_result_from_trace(trace, gamma, index)

    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            return list(pool.map(one_episode, range(n_episodes)))
    return [one_episode(i) for i in range(n_episodes)]


@dataclass(frozen=True)
class MethodSummary:
    method: str
    n_episodes: int
    mean_return: float
    std_return: float
    mean_loss: float
    std_loss: float
    component_means: LossComponents
    component_stds: LossComponents

    @staticmethod
    def from_results(method: str, results: Sequence[EpisodeResult]) -> "MethodSummary":
        if not results:
            raise ValueError(f"no episode results for method {method!r}")
        returns = np.array([r.discounted_return for r in results])
        losses = np.array([r.mean_step_loss for r in results])
        comps = np.array([r.component_means for r in results])
        ddof = 1 if len(results) > 1 else 0
        return MethodSummary(
            method=method,
            n_episodes=len(results),
            mean_return=float(returns.mean()),
            std_return=float(returns.std(ddof=ddof)),
            mean_loss=float(losses.mean()),
            std_loss=float(losses.std(ddof=ddof)),
            component_means=LossComponents(*(float(v) for v in comps.mean(axis=0))),
            component_stds=LossComponents(*(float(v) for v in comps.std(axis=0, ddof=ddof))),
        )


def cohens_d(sample_a: Sequence[float], sample_b: Sequence[float]) -> float:
    """Standardized mean difference with the pooled standard deviation.

    Equal means give 0 even when both samples are constant; unequal
    means with zero pooled spread give a signed infinity marker.
    """
    a = np.asarray(sample_a, dtype=float)
    b = np.asarray(sample_b, dtype=float)
    n_a, n_b = len(a), len(b)
    if n_a < 2 or n_b < 2:
        raise ValueError("need at least two observations per sample")
    diff = a.mean() - b.mean()
    pooled_var = ((n_a - 1) * a.var(ddof=1) + (n_b - 1) * b.var(ddof=1)) / (n_a + n_b - 2)
    pooled = float(np.sqrt(pooled_var))
    if pooled == 0.0:
        if diff == 0.0:
            return 0.0
        return float(np.copysign(np.inf, diff))
    return float(diff / pooled)


def welch_test(sample_a: Sequence[float], sample_b: Sequence[float]) -> float:
    """Two-sided Welch t-test p-value (Welch-Satterthwaite dof)."""
    a = np.asarray(sample_a, dtype=float)
    b = np.asarray(sample_b, dtype=float)
    if a.var(ddof=1) == 0.0 and b.var(ddof=1) == 0.0:
        return 1.0 if a.mean() == b.mean() else 0.0
    result = _stats.ttest_ind(a, b, equal_var=False)
    return float(result.pvalue)


def confidence_interval(
    sample: Sequence[float], level: float = 0.95
) -> tuple[float, float]:
    """Student-t interval for the mean: mean +/- t_{n-1} s / sqrt(n)."""
    a = np.asarray(sample, dtype=float)
    n = len(a)
    if n == 0:
        raise ValueError("empty sample")
    mean = float(a.mean())
    if n == 1:
        return (mean, mean)
    half = float(_stats.t.ppf(0.5 + level / 2.0, n - 1) * a.std(ddof=1) / np.sqrt(n))
    return (mean - half, mean + half)


def _fmt(value: float) -> str:
    return repr(float(value))


def write_summary_csv(summaries: Sequence[MethodSummary], path: Path) -> None:
    ordered = sorted(summaries, key=lambda s: s.mean_return, reverse=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_HEADER)
        for s in ordered:
            writer.writerow([s.method, _fmt(s.mean_return), _fmt(s.std_return), _fmt(s.mean_loss)])


def write_pairwise_csv(
    results_by_method: dict[str, list[EpisodeResult]],
    ordered_methods: Sequence[str],
    path: Path,
) -> None:
    returns = {
        m: [r.discounted_return for r in results_by_method[m]] for m in ordered_methods
    }
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "method_a", "method_b", "cohens_d", "p_value",
                "ci95_a_lo", "ci95_a_hi", "ci95_b_lo", "ci95_b_hi",
            ]
        )
        for m_a, m_b in combinations(ordered_methods, 2):
            d = cohens_d(returns[m_a], returns[m_b])
            p = welch_test(returns[m_a], returns[m_b])
            ci_a = confidence_interval(returns[m_a])
            ci_b = confidence_interval(returns[m_b])
            writer.writerow(
                [m_a, m_b, _fmt(d), _fmt(p), _fmt(ci_a[0]), _fmt(ci_a[1]), _fmt(ci_b[0]), _fmt(ci_b[1])]
            )


def write_episodes_csv(
    results_by_method: dict[str, list[EpisodeResult]],
    ordered_methods: Sequence[str],
    path: Path,
) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "method", "episode", "discounted_return", "mean_step_loss",
                "inflation_loss", "unemployment_loss", "smoothing_loss",
                "length", "terminated",
            ]
        )
        for method in ordered_methods:
            for r in results_by_method[method]:
                writer.writerow(
                    [
                        method,
                        r.episode_index,
                        _fmt(r.discounted_return),
                        _fmt(r.mean_step_loss),
                        _fmt(r.component_means.inflation),
                        _fmt(r.component_means.unemployment),
                        _fmt(r.component_means.smoothing),
                        r.length,
                        int(r.terminated),
                    ]
                )


def compare_all(
    results_by_method: dict[str, list[EpisodeResult]],
    out_dir: str | Path,
    manifest: dict | None = None,
) -> dict[str, Path]:
    """Emit the report files for a finished benchmark run.

    summary.csv is sorted by mean return, best first; pairwise.csv is
    skipped (with a warning) when fewer than two methods ran.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    summaries = [
        MethodSummary.from_results(m, results) for m, results in results_by_method.items()
    ]
    ordered_methods = [
        s.method for s in sorted(summaries, key=lambda s: s.mean_return, reverse=True)
    ]

    paths: dict[str, Path] = {}
    paths["summary"] = out_dir / "summary.csv"
    write_summary_csv(summaries, paths["summary"])

    if len(ordered_methods) >= 2:
        paths["pairwise"] = out_dir / "pairwise.csv"
        write_pairwise_csv(results_by_method, ordered_methods, paths["pairwise"])
    else:
        warnings.warn("fewer than 2 methods; skipping pairwise comparisons")

    paths["episodes"] = out_dir / "episodes.csv"
    write_episodes_csv(results_by_method, ordered_methods, paths["episodes"])

    paths["manifest"] = out_dir / "manifest.json"
    payload = dict(manifest or {})
    payload.setdefault("methods", ordered_methods)
    paths["manifest"].write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")
    return paths
