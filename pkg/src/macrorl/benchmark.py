"""End-to-end benchmark orchestration: ingest, fit, train, evaluate, report.

This is the programmatic face of the ``compare`` command. Given one
RunConfig it produces a report directory whose contents are a pure
function of the configuration: the fitted model file, per-method agent
files and training logs, the three report CSVs, and a manifest tying
them together.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

from .agents.policies import save_agent
from .agents.training import make_baseline_policy, train_agent
from .config import RunConfig
from .dynamics import FitDiagnostics, TransitionModel, fit_ols, save_model
from .environment import STANDARD_GRID
from .evaluation import EpisodeResult, MethodSummary, compare_all, evaluate_policy
from .market_data import StateSeries, load_state_series


@dataclass
class BenchmarkOutputs:
    model: TransitionModel
    diagnostics: FitDiagnostics
    history: StateSeries
    results_by_method: dict[str, list[EpisodeResult]]
    summaries: dict[str, MethodSummary]
    report_paths: dict[str, Path]
    out_dir: Path


def run_benchmark(config: RunConfig, progress=None) -> BenchmarkOutputs:
    """Run the complete pipeline for one configuration.

    ``progress`` may be a callable taking one status string; it is only
    for console feedback and has no effect on outputs.
    """

    def say(message: str) -> None:
        if progress is not None:
            progress(message)

    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    agents_dir = out_dir / "agents"
    agents_dir.mkdir(exist_ok=True)
    logs_dir = out_dir / "logs"
    logs_dir.mkdir(exist_ok=True)

    say(f"loading data from {config.data_dir}")
    history = load_state_series(config.data_dir)
    say(f"fitting dynamics on {history.n_transitions} transitions")
    model, diagnostics = fit_ols(history, with_intercept=config.intercept)
    model_path = out_dir / "model.txt"
    save_model(model, model_path)

    method_configs = config.resolved_method_configs()
    policies: dict[str, object] = {}
    for method, method_config in method_configs.items():
        say(f"training {method}")
        policy, log = train_agent(
            method,
            model,
            history,
            config.episode,
            config.reward,
            seed=config.seed,
            config=method_config,
        )
        policies[method] = policy
        save_agent(policy, agents_dir / f"{method}.json")
        log.to_csv(logs_dir / f"{method}_training.csv")

    for baseline in config.baselines:
        policies[baseline] = make_baseline_policy(
            baseline, STANDARD_GRID, config.reward.pi_star
        )

    results_by_method: dict[str, list[EpisodeResult]] = {}
    for name, policy in policies.items():
        say(f"evaluating {name} over {config.evaluation.episodes} episodes")
        results_by_method[name] = evaluate_policy(
            policy,
            model,
            history,
            policy.grid,
            config.episode,
            config.reward,
            n_episodes=config.evaluation.episodes,
            base_seed=config.evaluation.seed,
            gamma=config.gamma,
            n_workers=config.evaluation.workers,
        )

    manifest = {
        "seed": config.seed,
        "config": config.to_dict(),
        "model_hash": hashlib.sha256(model_path.read_bytes()).hexdigest(),
    }
    report_paths = compare_all(results_by_method, out_dir, manifest)
    report_paths["model"] = model_path

    summaries = {
        name: MethodSummary.from_results(name, results)
        for name, results in results_by_method.items()
    }
    return BenchmarkOutputs(
        model=model,
        diagnostics=diagnostics,
        history=history,
        results_by_method=results_by_method,
        summaries=summaries,
        report_paths=report_paths,
        out_dir=out_dir,
    )
