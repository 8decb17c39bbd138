"""LSTM: recurrence math, BPTT training, Adam, persistence."""

import json
import math

import numpy as np
import pytest

from mazemod.neural import Adam, Lstm, TrainingDivergedError


def _sig(x: float) -> float:
    return 1.0 / (1.0 + math.exp(-x))


def make_net(inp, hid, out, seed=0):
    return Lstm(inp, hid, out, np.random.default_rng(seed))


def _zero(net):
    for _, p in net.parameters():
        p[:] = 0.0
    return net


def reference_forward(net, inputs):
    """Step-by-step scalar recomputation of the recurrence."""
    hw = net.hidden_width
    h = [0.0] * hw
    c = [0.0] * hw
    outputs = []
    for x in inputs:
        z = [
            sum(x[i] * net.wx[i, k] for i in range(net.input_width))
            + sum(h[j] * net.wh[j, k] for j in range(hw))
            + net.b[k]
            for k in range(4 * hw)
        ]
        i_g = [_sig(z[k]) for k in range(hw)]
        f_g = [_sig(z[hw + k]) for k in range(hw)]
        g_g = [math.tanh(z[2 * hw + k]) for k in range(hw)]
        o_g = [_sig(z[3 * hw + k]) for k in range(hw)]
        c = [f_g[k] * c[k] + i_g[k] * g_g[k] for k in range(hw)]
        h = [o_g[k] * math.tanh(c[k]) for k in range(hw)]
        outputs.append(
            [
                _sig(sum(h[j] * net.wy[j, m] for j in range(hw)) + net.by[m])
                for m in range(net.output_width)
            ]
        )
    return np.array(outputs)


def test_forward_zero_params_is_half():
    net = _zero(make_net(3, 4, 2))
    inputs = np.random.default_rng(0).uniform(size=(5, 3))
    assert np.allclose(net.forward(inputs), 0.5)


def test_forward_matches_reference_recurrence():
    net = make_net(3, 2, 2, seed=12)
    inputs = np.random.default_rng(3).uniform(-1, 1, size=(4, 3))
    assert np.allclose(net.forward(inputs), reference_forward(net, inputs), atol=1e-12)


def test_length_one_equals_single_cell():
    net = make_net(2, 3, 2, seed=5)
    x = np.random.default_rng(1).uniform(size=(1, 2))
    assert np.allclose(net.forward(x), reference_forward(net, x), atol=1e-12)


def test_memorizes_constant_target_sequence():
    net = make_net(2, 6, 2, seed=1)
    inputs = np.random.default_rng(2).uniform(size=(3, 2))
    targets = np.tile([0.0, 1.0], (3, 1))
    net.train([(inputs, targets)], learning_rate=0.05, epochs=200,
              rng=np.random.default_rng(0))
    assert all(int(np.argmax(row)) == 1 for row in net.forward(inputs))


def test_remembers_first_input_at_second_step():
    # the second step's input is identical across sequences; only memory of
    # the first step distinguishes the targets
    net = make_net(2, 8, 2, seed=5)
    seqs = [
        (np.array([[1.0, 0.0], [0.0, 0.0]]), np.array([[1.0, 0.0], [1.0, 0.0]])),
        (np.array([[0.0, 1.0], [0.0, 0.0]]), np.array([[0.0, 1.0], [0.0, 1.0]])),
    ]
    net.train(seqs, learning_rate=0.02, epochs=300, rng=np.random.default_rng(5))
    for inputs, targets in seqs:
        got = [int(np.argmax(r)) for r in net.forward(inputs)]
        assert got == [int(np.argmax(r)) for r in targets]


def test_zero_gradient_is_fixed_point():
    net = make_net(2, 3, 2, seed=7)
    inputs = np.random.default_rng(0).uniform(size=(4, 2))
    targets = net.forward(inputs)  # loss and gradients exactly zero
    before = [p.copy() for _, p in net.parameters()]
    report = net.train([(inputs, targets)], epochs=3, rng=np.random.default_rng(0))
    for (_, p), b in zip(net.parameters(), before):
        assert np.array_equal(p, b)
    assert all(l < 1e-9 for l in report.epoch_losses)


def test_training_is_seed_deterministic():
    rng_data = np.random.default_rng(3)
    seqs = [
        (rng_data.uniform(size=(3, 2)), (rng_data.uniform(size=(3, 2)) < 0.5).astype(float))
        for _ in range(3)
    ]
    runs = []
    for _ in range(2):
        rng = np.random.default_rng(11)
        net = Lstm(2, 4, 2, rng)
        report = net.train(seqs, epochs=10, rng=rng)
        runs.append((report.epoch_losses, [p.copy() for _, p in net.parameters()]))
    assert runs[0][0] == runs[1][0]
    for a, b in zip(runs[0][1], runs[1][1]):
        assert np.array_equal(a, b)


def test_nonfinite_loss_raises():
    net = make_net(2, 3, 2)
    net.wx[0, 0] = np.nan
    with pytest.raises(TrainingDivergedError):
        net.train([(np.ones((2, 2)), np.zeros((2, 2)))], epochs=1,
                  rng=np.random.default_rng(0))


def test_checkpoint_roundtrip_lossless():
    net = make_net(3, 4, 2, seed=8)
    restored = Lstm.from_dict(json.loads(json.dumps(net.to_dict())))
    inputs = np.random.default_rng(4).uniform(size=(5, 3))
    assert np.array_equal(net.forward(inputs), restored.forward(inputs))


def test_width_validation():
    net = make_net(3, 4, 2)
    with pytest.raises(ValueError):
        net.forward(np.zeros((2, 4)))
    with pytest.raises(ValueError):
        net.train([], epochs=1, rng=np.random.default_rng(0))
    with pytest.raises(ValueError):
        net.train([(np.zeros((2, 3)), np.zeros((2, 3)))], epochs=1,
                  rng=np.random.default_rng(0))


def test_adam_first_step_hand_check():
    p = np.array([1.0])
    adam = Adam([p], learning_rate=0.1)
    adam.step([p], [np.array([0.5])])
    # bias correction makes the first update lr * g / (|g| + eps)
    assert abs(p[0] - (1.0 - 0.1 * 0.5 / (0.5 + 1e-8))) < 1e-12


def test_adam_moments_accumulate():
    p = np.array([0.0])
    adam = Adam([p], learning_rate=0.01)
    for _ in range(5):
        adam.step([p], [np.array([1.0])])
    assert adam.step_count == 5
    # constant gradient keeps each step near -lr
    assert -0.06 < p[0] < -0.04
