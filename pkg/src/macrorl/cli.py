"""Command-line entry point.

Subcommands wire the pipeline stages together:

    fit-dynamics   ingest FRED CSVs and fit the transition model
    train          train one named method against a fitted model
    evaluate       roll out trained agents and baselines, write reports
    compare        full pipeline from a single config file

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric
divergence. The MACRORL_DATA_DIR environment variable supplies the
default data directory.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

import numpy as np

from .agents.policies import load_agent, save_agent
from .agents.training import BASELINE_NAMES, METHOD_NAMES, make_baseline_policy, train_agent
from .belief import BeliefFilterPolicy
from .benchmark import run_benchmark
from .config import RunConfig, load_config
from .dynamics import fit_ols, load_model, save_model
from .environment import STANDARD_GRID, EpisodeConfig
from .errors import DataError, NumericError
from .evaluation import compare_all, evaluate_policy
from .market_data import load_state_series

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

DATA_DIR_ENV = "MACRORL_DATA_DIR"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; we use 1
        raise _UsageError(message)


def _default_data_dir() -> str:
    return os.environ.get(DATA_DIR_ENV, "data")


def build_parser() -> _Parser:
    parser = _Parser(prog="macrorl", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit-dynamics", help="fit the transition model from FRED CSVs")
    fit.add_argument("--data", default=None, help="directory of <SERIES_ID>.csv files")
    fit.add_argument("--intercept", choices=("on", "off"), default="on")
    fit.add_argument("--out", required=True, help="output model file")
    fit.add_argument("--diagnostics", default=None, help="optional diagnostics JSON path")

    train = sub.add_parser("train", help="train one method")
    train.add_argument("--method", required=True)
    train.add_argument("--model", required=True, help="fitted model file")
    train.add_argument("--data", default=None)
    train.add_argument("--out", required=True, help="output agent file")
    train.add_argument("--episodes", type=int, default=None)
    train.add_argument("--seed", type=int, default=0)
    train.add_argument("--log", default=None, help="optional training-log CSV path")
    train.add_argument("--config", default=None, help="config file with method_overrides")

    ev = sub.add_parser("evaluate", help="evaluate agents and baselines")
    ev.add_argument("--model", required=True)
    ev.add_argument("--data", default=None)
    ev.add_argument("--out-dir", required=True)
    ev.add_argument("--agents", nargs="*", default=[], help="agent files to evaluate")
    ev.add_argument("--baselines", default=",".join(BASELINE_NAMES),
                    help="comma list of rule baselines, or 'none'")
    ev.add_argument("--episodes", type=int, default=200)
    ev.add_argument("--seed", type=int, default=0)
    ev.add_argument("--workers", type=int, default=1)
    ev.add_argument("--gamma", type=float, default=0.99)
    ev.add_argument("--obs-noise", type=float, default=0.0,
                    help="observation noise sigma (POMDP variant)")
    ev.add_argument("--belief-filter", action="store_true",
                    help="let agents act on the particle-filter belief mean")

    cmp_ = sub.add_parser("compare", help="full benchmark from a config file")
    cmp_.add_argument("--config", default=None, help="JSON config; defaults used if omitted")
    cmp_.add_argument("--out-dir", default=None, help="override the config's out_dir")
    cmp_.add_argument("--data", default=None, help="override the config's data_dir")
    cmp_.add_argument("--seed", type=int, default=None)
    cmp_.add_argument("--workers", type=int, default=None)
    cmp_.add_argument("--print-config", action="store_true",
                      help="dump the resolved configuration and exit")
    cmp_.add_argument("--quiet", action="store_true")
    return parser


def cmd_fit(args) -> int:
    data_dir = args.data or _default_data_dir()
    history = load_state_series(data_dir)
    model, diagnostics = fit_ols(history, with_intercept=args.intercept == "on")
    save_model(model, args.out)
    if args.diagnostics:
        Path(args.diagnostics).write_text(
            json.dumps(
                {
                    "n_transitions": diagnostics.n_transitions,
                    "per_equation_r2": diagnostics.per_equation_r2.tolist(),
                    "residual_means": diagnostics.residual_means.tolist(),
                },
                indent=1,
                sort_keys=True,
            )
            + "\n"
        )
    print(f"fitted on {diagnostics.n_transitions} transitions -> {args.out}")
    print(f"per-equation R^2: {np.round(diagnostics.per_equation_r2, 4).tolist()}")
    return EXIT_OK


def cmd_train(args) -> int:
    if args.method not in METHOD_NAMES:
        raise _UsageError(
            f"unknown method {args.method!r}; valid methods: {', '.join(METHOD_NAMES)} "
            f"(baselines {', '.join(BASELINE_NAMES)} need no training)"
        )
    data_dir = args.data or _default_data_dir()
    model = load_model(args.model)
    history = load_state_series(data_dir)
    overrides = None
    if args.config:
        overrides = load_config(args.config).method_overrides.get(args.method)
    policy, log = train_agent(
        args.method,
        model,
        history,
        EpisodeConfig(),
        RunConfig().reward,
        seed=args.seed,
        episodes=args.episodes,
        overrides=overrides,
    )
    save_agent(policy, args.out)
    if args.log:
        log.to_csv(args.log)
    print(f"trained {args.method} for {len(log)} episodes -> {args.out}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    data_dir = args.data or _default_data_dir()
    model = load_model(args.model)
    history = load_state_series(data_dir)
    cfg = EpisodeConfig(observation_noise_sigma=args.obs_noise)
    reward_params = RunConfig().reward

    policies: dict[str, object] = {}
    for agent_path in args.agents:
        policy = load_agent(agent_path)
        policies[policy.method] = policy
    if args.baselines and args.baselines != "none":
        for name in args.baselines.split(","):
            name = name.strip()
            if name:
                policies[name] = make_baseline_policy(name, STANDARD_GRID, reward_params.pi_star)
    if not policies:
        raise _UsageError("nothing to evaluate: give --agents and/or --baselines")

    if args.belief_filter:
        policies = {
            name: BeliefFilterPolicy(policy, model, history,
                                     sigma_obs=args.obs_noise or 0.15)
            for name, policy in policies.items()
        }

    results = {}
    for name, policy in policies.items():
        grid = getattr(policy, "grid", None) or getattr(policy.inner, "grid")
        results[name] = evaluate_policy(
            policy, model, history, grid, cfg, reward_params,
            n_episodes=args.episodes, base_seed=args.seed,
            gamma=args.gamma, n_workers=args.workers,
        )
    manifest = {
        "seed": args.seed,
        "episodes": args.episodes,
        "gamma": args.gamma,
        "obs_noise": args.obs_noise,
        "belief_filter": bool(args.belief_filter),
        "model": str(args.model),
    }
    paths = compare_all(results, args.out_dir, manifest)
    print(f"wrote {', '.join(str(p) for p in paths.values())}")
    return EXIT_OK


def cmd_compare(args) -> int:
    config = load_config(args.config) if args.config else RunConfig()
    replacements = {}
    if args.out_dir is not None:
        replacements["out_dir"] = args.out_dir
    if args.data is not None:
        replacements["data_dir"] = args.data
    if args.seed is not None:
        replacements["seed"] = args.seed
    if args.workers is not None:
        replacements["evaluation"] = dataclasses.replace(
            config.evaluation, workers=args.workers
        )
    if replacements:
        config = dataclasses.replace(config, **replacements)

    if args.print_config:
        print(json.dumps(config.to_dict(), indent=1, sort_keys=True))
        return EXIT_OK

    progress = None if args.quiet else lambda msg: print(msg, file=sys.stderr)
    outputs = run_benchmark(config, progress=progress)
    ordered = sorted(outputs.summaries.values(), key=lambda s: s.mean_return, reverse=True)
    width = max(len(s.method) for s in ordered)
    print(f"{'method'.ljust(width)}  mean_return  std_return  mean_loss")
    for s in ordered:
        print(
            f"{s.method.ljust(width)}  {s.mean_return:11.2f}  {s.std_return:10.2f}  "
            f"{s.mean_loss:9.2f}"
        )
    print(f"reports in {outputs.out_dir}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    handlers = {
        "fit-dynamics": cmd_fit,
        "train": cmd_train,
        "evaluate": cmd_evaluate,
        "compare": cmd_compare,
    }
    try:
        return handlers[args.command](args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
