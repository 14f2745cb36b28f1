"""Network gradients against finite differences, replay FIFO, target freezing."""

import numpy as np
import pytest

from macrorl.agents.dqn import MLP, Adam, DqnNet, ReplayBuffer, dqn_train_step, td_loss
from macrorl.errors import DivergenceError


def test_backprop_matches_finite_differences():
    rng = np.random.default_rng(12)
    net = MLP((4, 8, 8, 3), rng)
    batch = 16
    obs = rng.normal(0, 1, size=(batch, 4))
    actions = rng.integers(0, 3, size=batch)
    targets = rng.normal(-5, 2, size=batch)

    activations = net.forward(obs)
    q = activations[-1]
    picked = q[np.arange(batch), actions]
    grad_out = np.zeros_like(q)
    grad_out[np.arange(batch), actions] = 2.0 * (picked - targets) / batch
    analytic = net.backward(activations, grad_out)

    h = 1e-5
    worst = 0.0
    for param, grad in zip(net.parameters(), analytic):
        flat_p = param.ravel()
        flat_g = grad.ravel()
        for k in range(flat_p.size):
            original = flat_p[k]
            flat_p[k] = original + h
            up = td_loss(net, obs, actions, targets)
            flat_p[k] = original - h
            down = td_loss(net, obs, actions, targets)
            flat_p[k] = original
            numeric = (up - down) / (2 * h)
            scale = max(abs(numeric), abs(flat_g[k]), 1e-4)
            worst = max(worst, abs(numeric - flat_g[k]) / scale)
    assert worst < 1e-4


def test_replay_fifo_eviction_at_capacity():
    buffer = ReplayBuffer(capacity=10_000, obs_dim=4)
    for k in range(10_000):
        buffer.add(np.full(4, float(k)), k % 3, float(k), np.full(4, float(k + 1)), False)
    assert len(buffer) == 10_000
    assert buffer.obs[0, 0] == 0.0
    buffer.add(np.full(4, -1.0), 0, -1.0, np.full(4, -2.0), True)
    assert len(buffer) == 10_000              # capacity never exceeded
    assert buffer.obs[0, 0] == -1.0           # oldest slot overwritten
    assert buffer.obs[1, 0] == 1.0            # second-oldest still present


def test_sample_requires_enough_transitions():
    buffer = ReplayBuffer(capacity=10, obs_dim=4)
    buffer.add(np.zeros(4), 0, 0.0, np.zeros(4), False)
    with pytest.raises(ValueError):
        buffer.sample_indices(np.random.default_rng(0), 2)


def test_target_net_frozen_between_syncs():
    rng = np.random.default_rng(3)
    net = DqnNet.create(4, 3, rng, hidden=(8, 8), buffer_capacity=100)
    for _ in range(64):
        net.buffer.add(rng.normal(size=4), int(rng.integers(3)), float(rng.normal(-2)),
                       rng.normal(size=4), False)
    target_before = [p.copy() for p in net.target.parameters()]
    online_before = [p.copy() for p in net.online.parameters()]
    for _ in range(5):
        dqn_train_step(net, rng, batch_size=32)
    assert all(np.array_equal(a, b) for a, b in zip(target_before, net.target.parameters()))
    assert not all(np.array_equal(a, b) for a, b in zip(online_before, net.online.parameters()))
    net.sync_target()
    assert all(
        np.array_equal(a, b)
        for a, b in zip(net.online.parameters(), net.target.parameters())
    )


def test_train_step_reduces_loss_on_fixed_batch():
    rng = np.random.default_rng(5)
    net = DqnNet.create(4, 3, rng, hidden=(8, 8), buffer_capacity=64)
    for _ in range(64):
        net.buffer.add(rng.normal(size=4), int(rng.integers(3)), float(rng.normal(-3)),
                       rng.normal(size=4), True)  # done: targets are just rewards
    losses = [dqn_train_step(net, rng, batch_size=64) for _ in range(200)]
    assert losses[-1] < losses[0] * 0.5


def test_divergence_detected():
    rng = np.random.default_rng(5)
    net = DqnNet.create(4, 2, rng, hidden=(4,), buffer_capacity=8)
    for _ in range(8):
        net.buffer.add(rng.normal(size=4), 0, float("inf"), rng.normal(size=4), True)
    with pytest.raises(DivergenceError):
        dqn_train_step(net, rng, batch_size=8)


def test_adam_minimizes_quadratic():
    # sanity: Adam drives a simple quadratic to its minimum
    param = np.array([5.0, -3.0])
    opt = Adam([param], lr=0.05)
    for _ in range(2000):
        opt.step([2.0 * (param - np.array([1.0, 2.0]))])
    assert np.allclose(param, [1.0, 2.0], atol=1e-3)
