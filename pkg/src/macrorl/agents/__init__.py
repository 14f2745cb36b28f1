"""Learning agents, rule baselines, and their training loops."""

from .actor_critic import (
    FeatureScaler,
    LinearActorCritic,
    actor_critic_step,
    log_policy_gradient,
    reinforce_episode_update,
)
from .baselines import (
    TAYLOR_STANDARD,
    TAYLOR_TUNED,
    HoldPolicy,
    TaylorParams,
    TaylorPolicy,
    hold_action,
    taylor_action,
    taylor_rate,
)
from .bayesian import GaussianQPosterior, bayes_q_update, thompson_select, ucb_select
from .dqn import MLP, Adam, DqnNet, ReplayBuffer, dqn_train_step, td_loss
from .policies import (
    ActorCriticPolicy,
    DqnPolicy,
    TabularPolicy,
    load_agent,
    save_agent,
)
from .tabular import QTable, epsilon_greedy, epsilon_schedule, q_learning_update, sarsa_update
from .training import (
    BASELINE_NAMES,
    METHOD_NAMES,
    ActorCriticTrainConfig,
    BayesTrainConfig,
    DqnTrainConfig,
    TabularTrainConfig,
    TrainingLog,
    default_method_configs,
    make_baseline_policy,
    override_config,
    train_agent,
)

__all__ = [
    "FeatureScaler",
    "LinearActorCritic",
    "actor_critic_step",
    "log_policy_gradient",
    "reinforce_episode_update",
    "TAYLOR_STANDARD",
    "TAYLOR_TUNED",
    "HoldPolicy",
    "TaylorParams",
    "TaylorPolicy",
    "hold_action",
    "taylor_action",
    "taylor_rate",
    "GaussianQPosterior",
    "bayes_q_update",
    "thompson_select",
    "ucb_select",
    "MLP",
    "Adam",
    "DqnNet",
    "ReplayBuffer",
    "dqn_train_step",
    "td_loss",
    "ActorCriticPolicy",
    "DqnPolicy",
    "TabularPolicy",
    "load_agent",
    "save_agent",
    "QTable",
    "epsilon_greedy",
    "epsilon_schedule",
    "q_learning_update",
    "sarsa_update",
    "BASELINE_NAMES",
    "METHOD_NAMES",
    "ActorCriticTrainConfig",
    "BayesTrainConfig",
    "DqnTrainConfig",
    "TabularTrainConfig",
    "TrainingLog",
    "default_method_configs",
    "make_baseline_policy",
    "override_config",
    "train_agent",
]
