"""Deep Q-network built on plain numpy.

A small fully connected ReLU network with manual backpropagation and an
Adam-style optimizer keeps training bit-reproducible under a seeded
generator. Experience replay uses a fixed-capacity ring buffer with
FIFO eviction; a frozen copy of the network provides bootstrap targets
and is refreshed every fixed number of environment steps by the
training loop.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DivergenceError

DEFAULT_HIDDEN = (64, 64)
DEFAULT_BUFFER_CAPACITY = 10_000
DEFAULT_BATCH_SIZE = 64
DEFAULT_LEARNING_RATE = 1e-3
DEFAULT_TARGET_SYNC_EVERY = 100


class MLP:
    """Fully connected net, ReLU hidden layers, linear output."""

    def __init__(self, layer_sizes: tuple[int, ...], rng: np.random.Generator):
        self.layer_sizes = tuple(layer_sizes)
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        for fan_in, fan_out in zip(layer_sizes, layer_sizes[1:]):
            scale = np.sqrt(2.0 / fan_in)
            self.weights.append(rng.standard_normal((fan_in, fan_out)) * scale)
            self.biases.append(np.zeros(fan_out))

    def parameters(self) -> list[np.ndarray]:
        params = []
        for w, b in zip(self.weights, self.biases):
            params.append(w)
            params.append(b)
        return params

    def copy_from(self, other: "MLP") -> None:
        for dst, src in zip(self.parameters(), other.parameters()):
            np.copyto(dst, src)

    def forward(self, x: np.ndarray) -> list[np.ndarray]:
        """All layer activations, input first, post-ReLU for hidden layers."""
        activations = [x]
        last = len(self.weights) - 1
        for k, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = activations[-1] @ w + b
            if k < last:
                z = np.maximum(z, 0.0)
            activations.append(z)
        return activations

    def predict(self, x: np.ndarray) -> np.ndarray:
        return self.forward(x)[-1]

    def backward(
        self, activations: list[np.ndarray], grad_output: np.ndarray
    ) -> list[np.ndarray]:
        """Gradients for every parameter, matching parameters() order."""
        grads_w: list[np.ndarray] = [None] * len(self.weights)  # type: ignore[list-item]
        grads_b: list[np.ndarray] = [None] * len(self.biases)   # type: ignore[list-item]
        delta = grad_output
        for k in reversed(range(len(self.weights))):
            grads_w[k] = activations[k].T @ delta
            grads_b[k] = delta.sum(axis=0)
            if k > 0:
                delta = (delta @ self.weights[k].T) * (activations[k] > 0)
        out: list[np.ndarray] = []
        for gw, gb in zip(grads_w, grads_b):
            out.append(gw)
            out.append(gb)
        return out


class Adam:
    """Adaptive moment estimation on a fixed list of parameter arrays."""

    def __init__(
        self,
        params: list[np.ndarray],
        lr: float = DEFAULT_LEARNING_RATE,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ):
        self.params = params
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]

    def step(self, grads: list[np.ndarray]) -> None:
        self.t += 1
        bias1 = 1.0 - self.beta1**self.t
        bias2 = 1.0 - self.beta2**self.t
        for p, g, m, v in zip(self.params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= self.lr * (m / bias1) / (np.sqrt(v / bias2) + self.eps)


class ReplayBuffer:
    """Ring buffer of transitions with FIFO eviction at capacity."""

    def __init__(self, capacity: int, obs_dim: int):
        self.capacity = capacity
        self.obs = np.zeros((capacity, obs_dim))
        self.actions = np.zeros(capacity, dtype=np.int64)
        self.rewards = np.zeros(capacity)
        self.next_obs = np.zeros((capacity, obs_dim))
        self.dones = np.zeros(capacity)
        self.size = 0
        self.cursor = 0

    def __len__(self) -> int:
        return self.size

    def add(
        self, obs: np.ndarray, action: int, reward: float, next_obs: np.ndarray, done: bool
    ) -> None:
        i = self.cursor
        self.obs[i] = obs
        self.actions[i] = action
        self.rewards[i] = reward
        self.next_obs[i] = next_obs
        self.dones[i] = 1.0 if done else 0.0
        self.cursor = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample_indices(self, rng: np.random.Generator, batch_size: int) -> np.ndarray:
        if self.size < batch_size:
            raise ValueError(f"buffer holds {self.size} < batch size {batch_size}")
        return rng.integers(0, self.size, size=batch_size)


@dataclass
class DqnNet:
    """Online and frozen target networks plus replay and optimizer state."""

    online: MLP
    target: MLP
    buffer: ReplayBuffer
    optimizer: Adam
    gamma: float = 0.99
    env_steps: int = field(default=0)

    @staticmethod
    def create(
        obs_dim: int,
        n_actions: int,
        rng: np.random.Generator,
        hidden: tuple[int, ...] = DEFAULT_HIDDEN,
        buffer_capacity: int = DEFAULT_BUFFER_CAPACITY,
        lr: float = DEFAULT_LEARNING_RATE,
        gamma: float = 0.99,
    ) -> "DqnNet":
        sizes = (obs_dim, *hidden, n_actions)
        online = MLP(sizes, rng)
        target = MLP(sizes, rng)
        target.copy_from(online)
        return DqnNet(
            online=online,
            target=target,
            buffer=ReplayBuffer(buffer_capacity, obs_dim),
            optimizer=Adam(online.parameters(), lr=lr),
            gamma=gamma,
        )

    def sync_target(self) -> None:
        self.target.copy_from(self.online)

    def q_values(self, obs: np.ndarray) -> np.ndarray:
        return self.online.predict(obs.reshape(1, -1))[0]


def td_loss(
    net: MLP, obs: np.ndarray, actions: np.ndarray, targets: np.ndarray
) -> float:
    """Mean squared TD loss of a batch, forward pass only."""
    q = net.predict(obs)
    picked = q[np.arange(len(actions)), actions]
    return float(np.mean((picked - targets) ** 2))


def dqn_train_step(
    net: DqnNet,
    rng: np.random.Generator,
    batch_size: int = DEFAULT_BATCH_SIZE,
) -> float:
    """Sample a batch, take one Adam step on the TD loss, return the loss."""
    idx = net.buffer.sample_indices(rng, batch_size)
    obs = net.buffer.obs[idx]
    actions = net.buffer.actions[idx]
    rewards = net.buffer.rewards[idx]
    next_obs = net.buffer.next_obs[idx]
    dones = net.buffer.dones[idx]

    next_q = net.target.predict(next_obs)
    targets = rewards + net.gamma * next_q.max(axis=1) * (1.0 - dones)

    activations = net.online.forward(obs)
    q = activations[-1]
    picked = q[np.arange(batch_size), actions]
    errors = picked - targets
    loss = float(np.mean(errors**2))
    if not np.isfinite(loss):
        raise DivergenceError(f"non-finite TD loss {loss}")

    grad_output = np.zeros_like(q)
    grad_output[np.arange(batch_size), actions] = 2.0 * errors / batch_size
    grads = net.online.backward(activations, grad_output)
    net.optimizer.step(grads)
    return loss
