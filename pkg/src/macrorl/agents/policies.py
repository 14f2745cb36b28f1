"""Trained decision rules behind one interface, plus file round-tripping.

Every policy maps an observed MacroState to an action index through
``select_action``; value-based ones also expose per-action estimates
(and, for the Bayesian learners, per-action uncertainty). Policies here
are the exploration-free evaluation form of each method. Saved agent
files are versioned JSON carrying the method name, action grid,
discretizer spec where applicable, and all learned parameters at full
precision.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..discretizers import DiscretizerSpec, encode
from ..environment import ActionGrid, MacroState
from ..errors import ModelFileError
from .actor_critic import FeatureScaler, LinearActorCritic
from .baselines import HoldPolicy, TaylorParams, TaylorPolicy
from .dqn import MLP

AGENT_FILE_MAGIC = "macrorl-agent"
AGENT_FILE_VERSION = 1


@dataclass(frozen=True)
class TabularPolicy:
    """Greedy lookup over a fitted (states x actions) value table."""

    table: np.ndarray
    spec: DiscretizerSpec
    grid: ActionGrid
    method: str
    uncertainty: np.ndarray | None = None  # per-cell std, Bayesian methods only

    def select_action(self, obs: MacroState, rng: np.random.Generator | None = None) -> int:
        return int(np.argmax(self.table[encode(self.spec, obs)]))

    def action_values(self, obs: MacroState) -> np.ndarray:
        return self.table[encode(self.spec, obs)].copy()


@dataclass(frozen=True)
class ActorCriticPolicy:
    ac: LinearActorCritic
    grid: ActionGrid
    method: str = "actor_critic"

    def select_action(self, obs: MacroState, rng: np.random.Generator | None = None) -> int:
        return int(np.argmax(self.ac.policy_probs(self.ac.scaler.features(obs))))

    def action_probabilities(self, obs: MacroState) -> np.ndarray:
        return self.ac.policy_probs(self.ac.scaler.features(obs))


@dataclass(frozen=True)
class DqnPolicy:
    net: MLP
    scaler: FeatureScaler
    grid: ActionGrid
    method: str = "dqn"

    def select_action(self, obs: MacroState, rng: np.random.Generator | None = None) -> int:
        return int(np.argmax(self.action_values(obs)))

    def action_values(self, obs: MacroState) -> np.ndarray:
        return self.net.predict(self.scaler.standardize(obs).reshape(1, -1))[0]


def _array(data) -> list:
    return np.asarray(data, dtype=float).tolist()


def save_agent(policy, path: str | Path) -> None:
    """Write any supported policy as versioned JSON."""
    payload: dict = {
        "format": AGENT_FILE_MAGIC,
        "version": AGENT_FILE_VERSION,
        "grid": list(policy.grid.deltas),
    }
    if isinstance(policy, TabularPolicy):
        payload["kind"] = "tabular"
        payload["method"] = policy.method
        payload["discretizer"] = policy.spec.to_dict()
        payload["params"] = {"table": _array(policy.table)}
        if policy.uncertainty is not None:
            payload["params"]["uncertainty"] = _array(policy.uncertainty)
    elif isinstance(policy, ActorCriticPolicy):
        payload["kind"] = "actor_critic"
        payload["method"] = policy.method
        payload["params"] = {
            "theta": _array(policy.ac.theta),
            "w": _array(policy.ac.w),
            "scaler_means": _array(policy.ac.scaler.means),
            "scaler_stds": _array(policy.ac.scaler.stds),
        }
    elif isinstance(policy, DqnPolicy):
        payload["kind"] = "dqn"
        payload["method"] = policy.method
        payload["params"] = {
            "layer_sizes": list(policy.net.layer_sizes),
            "weights": [_array(w) for w in policy.net.weights],
            "biases": [_array(b) for b in policy.net.biases],
            "scaler_means": _array(policy.scaler.means),
            "scaler_stds": _array(policy.scaler.stds),
        }
    elif isinstance(policy, TaylorPolicy):
        payload["kind"] = "taylor"
        payload["method"] = "taylor"
        payload["params"] = {
            "r_star": policy.params.r_star,
            "phi_pi": policy.params.phi_pi,
            "phi_y": policy.params.phi_y,
            "pi_star": policy.pi_star,
        }
    elif isinstance(policy, HoldPolicy):
        payload["kind"] = "hold"
        payload["method"] = "hold"
        payload["params"] = {}
    else:
        raise TypeError(f"cannot save policy of type {type(policy).__name__}")
    Path(path).write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")


def load_agent(path: str | Path):
    """Read back a policy saved by save_agent."""
    path = Path(path)
    try:
        payload = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(payload, dict) or payload.get("format") != AGENT_FILE_MAGIC:
        raise ModelFileError(f"{path}: not an agent file (bad magic)")
    if payload.get("version") != AGENT_FILE_VERSION:
        raise ModelFileError(f"{path}: unsupported version {payload.get('version')}")

    grid = ActionGrid(tuple(float(d) for d in payload["grid"]))
    kind = payload.get("kind")
    params = payload.get("params", {})
    method = payload.get("method", kind)

    if kind == "tabular":
        spec = DiscretizerSpec.from_dict(payload["discretizer"])
        uncertainty = params.get("uncertainty")
        return TabularPolicy(
            table=np.asarray(params["table"], dtype=float),
            spec=spec,
            grid=grid,
            method=method,
            uncertainty=None if uncertainty is None else np.asarray(uncertainty, dtype=float),
        )
    if kind == "actor_critic":
        scaler = FeatureScaler(
            means=np.asarray(params["scaler_means"], dtype=float),
            stds=np.asarray(params["scaler_stds"], dtype=float),
        )
        ac = LinearActorCritic(
            theta=np.asarray(params["theta"], dtype=float),
            w=np.asarray(params["w"], dtype=float),
            scaler=scaler,
        )
        return ActorCriticPolicy(ac=ac, grid=grid, method=method)
    if kind == "dqn":
        sizes = tuple(int(n) for n in params["layer_sizes"])
        net = MLP(sizes, np.random.default_rng(0))
        net.weights = [np.asarray(w, dtype=float) for w in params["weights"]]
        net.biases = [np.asarray(b, dtype=float) for b in params["biases"]]
        scaler = FeatureScaler(
            means=np.asarray(params["scaler_means"], dtype=float),
            stds=np.asarray(params["scaler_stds"], dtype=float),
        )
        return DqnPolicy(net=net, scaler=scaler, grid=grid, method=method)
    if kind == "taylor":
        return TaylorPolicy(
            params=TaylorParams(
                r_star=float(params["r_star"]),
                phi_pi=float(params["phi_pi"]),
                phi_y=float(params["phi_y"]),
            ),
            grid=grid,
            pi_star=float(params.get("pi_star", 2.0)),
        )
    if kind == "hold":
        return HoldPolicy(grid=grid)
    raise ModelFileError(f"{path}: unknown agent kind {kind!r}")
