"""From-scratch trainable networks: an online-SGD perceptron and a BPTT LSTM.

Both nets use sigmoid outputs, squared-error loss, and argmax decoding.  All
gradients are hand-derived; ``gradient_check`` compares any of them against
central finite differences.  Training is deterministic given a seeded
generator: same seed and data give bit-identical parameters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit as sigmoid


class TrainingDivergedError(RuntimeError):
    """Training produced a non-finite loss."""


@dataclass
class TrainReport:
    """Per-epoch mean losses of one training run."""

    epoch_losses: list[float]

    @property
    def epochs_run(self) -> int:
        return len(self.epoch_losses)

    @property
    def final_loss(self) -> float:
        return self.epoch_losses[-1] if self.epoch_losses else float("nan")


def _uniform_init(rng: np.random.Generator, fan_in: int, shape: tuple) -> np.ndarray:
    limit = 0.5 / np.sqrt(fan_in)
    return rng.uniform(-limit, limit, size=shape)


def _check_finite(loss: float, where: str) -> None:
    if not np.isfinite(loss):
        raise TrainingDivergedError(f"non-finite loss during {where}: {loss}")


class Mlp:
    """Single hidden layer, sigmoid activations throughout.

    Per-sample loss is 0.5 * sum of squared output errors; training applies
    one momentum-SGD update per sample in a shuffled pass per epoch.
    """

    def __init__(
        self, input_width: int, hidden_width: int, output_width: int, rng: np.random.Generator
    ):
        self.input_width = input_width
        self.hidden_width = hidden_width
        self.output_width = output_width
        self.w1 = _uniform_init(rng, input_width, (input_width, hidden_width))
        self.b1 = np.zeros(hidden_width)
        self.w2 = _uniform_init(rng, hidden_width, (hidden_width, output_width))
        self.b2 = np.zeros(output_width)

    def parameters(self) -> list[tuple[str, np.ndarray]]:
        return [("w1", self.w1), ("b1", self.b1), ("w2", self.w2), ("b2", self.b2)]

    def forward(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.input_width,):
            raise ValueError(f"expected input of shape ({self.input_width},), got {x.shape}")
        h = sigmoid(x @ self.w1 + self.b1)
        return sigmoid(h @ self.w2 + self.b2)

    def forward_batch(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        if xs.ndim != 2 or xs.shape[1] != self.input_width:
            raise ValueError(f"expected inputs of shape (N, {self.input_width}), got {xs.shape}")
        hs = sigmoid(xs @ self.w1 + self.b1)
        return sigmoid(hs @ self.w2 + self.b2)

    def batch_loss(self, xs: np.ndarray, targets: np.ndarray) -> float:
        ys = self.forward_batch(xs)
        err = ys - targets
        return float(0.5 * np.sum(err * err) / len(xs))

    def batch_loss_and_grads(
        self, xs: np.ndarray, targets: np.ndarray
    ) -> tuple[float, list[np.ndarray]]:
        """Mean per-sample loss over the batch and its exact gradients."""
        xs = np.asarray(xs, dtype=float)
        targets = np.asarray(targets, dtype=float)
        n = len(xs)
        hs = sigmoid(xs @ self.w1 + self.b1)
        ys = sigmoid(hs @ self.w2 + self.b2)
        err = ys - targets
        loss = float(0.5 * np.sum(err * err) / n)
        d2 = err * ys * (1.0 - ys) / n
        gw2 = hs.T @ d2
        gb2 = d2.sum(axis=0)
        dh = (d2 @ self.w2.T) * hs * (1.0 - hs)
        gw1 = xs.T @ dh
        gb1 = dh.sum(axis=0)
        return loss, [gw1, gb1, gw2, gb2]

    def train(
        self,
        xs: np.ndarray,
        targets: np.ndarray,
        *,
        learning_rate: float = 0.1,
        momentum: float = 0.2,
        epochs: int = 5000,
        rng: np.random.Generator,
    ) -> TrainReport:
        """Online SGD with momentum, sample order reshuffled every epoch."""
        xs = np.asarray(xs, dtype=float)
        targets = np.asarray(targets, dtype=float)
        if len(xs) == 0:
            raise ValueError("empty sample set")
        if xs.shape[1] != self.input_width or targets.shape[1] != self.output_width:
            raise ValueError("sample widths do not match network widths")
        n = len(xs)
        vw1 = np.zeros_like(self.w1)
        vb1 = np.zeros_like(self.b1)
        vw2 = np.zeros_like(self.w2)
        vb2 = np.zeros_like(self.b2)
        lr = learning_rate
        losses = []
        for _ in range(epochs):
            loss_sum = 0.0
            for idx in rng.permutation(n):
                x = xs[idx]
                t = targets[idx]
                h = sigmoid(x @ self.w1 + self.b1)
                y = sigmoid(h @ self.w2 + self.b2)
                e = y - t
                loss_sum += 0.5 * float(e @ e)
                d2 = e * y * (1.0 - y)
                d1 = (self.w2 @ d2) * h * (1.0 - h)
                vw2 *= momentum
                vw2 -= lr * np.outer(h, d2)
                self.w2 += vw2
                vb2 *= momentum
                vb2 -= lr * d2
                self.b2 += vb2
                vw1 *= momentum
                vw1 -= lr * np.outer(x, d1)
                self.w1 += vw1
                vb1 *= momentum
                vb1 -= lr * d1
                self.b1 += vb1
            epoch_loss = loss_sum / n
            _check_finite(epoch_loss, "MLP training")
            losses.append(epoch_loss)
        return TrainReport(epoch_losses=losses)

    def to_dict(self) -> dict:
        return {
            "kind": "mlp",
            "version": 1,
            "input_width": self.input_width,
            "hidden_width": self.hidden_width,
            "output_width": self.output_width,
            "w1": self.w1.tolist(),
            "b1": self.b1.tolist(),
            "w2": self.w2.tolist(),
            "b2": self.b2.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Mlp":
        net = cls.__new__(cls)
        net.input_width = doc["input_width"]
        net.hidden_width = doc["hidden_width"]
        net.output_width = doc["output_width"]
        net.w1 = np.asarray(doc["w1"], dtype=float)
        net.b1 = np.asarray(doc["b1"], dtype=float)
        net.w2 = np.asarray(doc["w2"], dtype=float)
        net.b2 = np.asarray(doc["b2"], dtype=float)
        return net


class Adam:
    """Bias-corrected adaptive moment updates over a list of parameter arrays."""

    def __init__(
        self,
        params: list[np.ndarray],
        learning_rate: float,
        beta1: float = 0.9,
        beta2: float = 0.999,
        epsilon: float = 1e-8,
    ):
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.step_count = 0
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]

    def step(self, params: list[np.ndarray], grads: list[np.ndarray]) -> None:
        self.step_count += 1
        bc1 = 1.0 - self.beta1**self.step_count
        bc2 = 1.0 - self.beta2**self.step_count
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * (g * g)
            update = m / bc1
            update /= np.sqrt(v / bc2) + self.epsilon
            update *= self.learning_rate
            p -= update


class Lstm:
    """Single-layer LSTM with a sigmoid readout at every step.

    Gate order in the concatenated weight matrices is [input, forget,
    candidate, output].  Initial hidden and cell states are zero.  The
    per-sequence loss is the squared error averaged over every step and
    output unit; training applies one Adam update per sequence.
    """

    def __init__(
        self, input_width: int, hidden_width: int, output_width: int, rng: np.random.Generator
    ):
        self.input_width = input_width
        self.hidden_width = hidden_width
        self.output_width = output_width
        h = hidden_width
        self.wx = _uniform_init(rng, input_width, (input_width, 4 * h))
        self.wh = _uniform_init(rng, h, (h, 4 * h))
        self.b = np.zeros(4 * h)
        self.wy = _uniform_init(rng, h, (h, output_width))
        self.by = np.zeros(output_width)

    def parameters(self) -> list[tuple[str, np.ndarray]]:
        return [("wx", self.wx), ("wh", self.wh), ("b", self.b), ("wy", self.wy), ("by", self.by)]

    def forward(self, inputs: np.ndarray) -> np.ndarray:
        """Per-step outputs for one sequence, shape (T, output_width)."""
        inputs = np.asarray(inputs, dtype=float)
        if inputs.ndim != 2 or inputs.shape[1] != self.input_width:
            raise ValueError(
                f"expected inputs of shape (T, {self.input_width}), got {inputs.shape}"
            )
        hw = self.hidden_width
        h = np.zeros(hw)
        c = np.zeros(hw)
        outputs = np.empty((len(inputs), self.output_width))
        for t, x in enumerate(inputs):
            z = x @ self.wx + h @ self.wh + self.b
            i = sigmoid(z[:hw])
            f = sigmoid(z[hw:2 * hw])
            g = np.tanh(z[2 * hw:3 * hw])
            o = sigmoid(z[3 * hw:])
            c = f * c + i * g
            h = o * np.tanh(c)
            outputs[t] = sigmoid(h @ self.wy + self.by)
        return outputs

    def sequence_loss_and_grads(
        self, inputs: np.ndarray, targets: np.ndarray
    ) -> tuple[float, list[np.ndarray]]:
        """Loss of one sequence and its gradients via backprop through time."""
        inputs = np.asarray(inputs, dtype=float)
        targets = np.asarray(targets, dtype=float)
        steps = len(inputs)
        hw = self.hidden_width
        # Forward pass, caching per-step gate activations and states.
        i_s = np.empty((steps, hw))
        f_s = np.empty((steps, hw))
        g_s = np.empty((steps, hw))
        o_s = np.empty((steps, hw))
        c_s = np.empty((steps, hw))
        tc_s = np.empty((steps, hw))
        h_s = np.empty((steps, hw))
        ys = np.empty((steps, self.output_width))
        h = np.zeros(hw)
        c = np.zeros(hw)
        for t in range(steps):
            z = inputs[t] @ self.wx + h @ self.wh + self.b
            i_s[t] = sigmoid(z[:hw])
            f_s[t] = sigmoid(z[hw:2 * hw])
            g_s[t] = np.tanh(z[2 * hw:3 * hw])
            o_s[t] = sigmoid(z[3 * hw:])
            c = f_s[t] * c + i_s[t] * g_s[t]
            c_s[t] = c
            tc_s[t] = np.tanh(c)
            h = o_s[t] * tc_s[t]
            h_s[t] = h
            ys[t] = sigmoid(h @ self.wy + self.by)

        err = ys - targets
        denom = err.size
        loss = float(np.sum(err * err) / denom)

        gwx = np.zeros_like(self.wx)
        gwh = np.zeros_like(self.wh)
        gb = np.zeros_like(self.b)
        gwy = np.zeros_like(self.wy)
        gby = np.zeros_like(self.by)
        dh_carry = np.zeros(hw)
        dc_carry = np.zeros(hw)
        dz = np.empty(4 * hw)
        for t in reversed(range(steps)):
            dzy = (2.0 / denom) * err[t] * ys[t] * (1.0 - ys[t])
            gwy += np.outer(h_s[t], dzy)
            gby += dzy
            dh = self.wy @ dzy + dh_carry
            dc = dh * o_s[t] * (1.0 - tc_s[t] ** 2) + dc_carry
            c_prev = c_s[t - 1] if t > 0 else np.zeros(hw)
            h_prev = h_s[t - 1] if t > 0 else np.zeros(hw)
            dz[:hw] = dc * g_s[t] * i_s[t] * (1.0 - i_s[t])
            dz[hw:2 * hw] = dc * c_prev * f_s[t] * (1.0 - f_s[t])
            dz[2 * hw:3 * hw] = dc * i_s[t] * (1.0 - g_s[t] ** 2)
            dz[3 * hw:] = dh * tc_s[t] * o_s[t] * (1.0 - o_s[t])
            gwx += np.outer(inputs[t], dz)
            gwh += np.outer(h_prev, dz)
            gb += dz
            dh_carry = self.wh @ dz
            dc_carry = dc * f_s[t]
        return loss, [gwx, gwh, gb, gwy, gby]

    def batch_loss(self, sequences: list[tuple[np.ndarray, np.ndarray]]) -> float:
        total = 0.0
        for inputs, targets in sequences:
            ys = self.forward(inputs)
            err = ys - np.asarray(targets, dtype=float)
            total += float(np.sum(err * err) / err.size)
        return total / len(sequences)

    def batch_loss_and_grads(
        self, sequences: list[tuple[np.ndarray, np.ndarray]]
    ) -> tuple[float, list[np.ndarray]]:
        """Mean per-sequence loss and pooled gradients (for gradient checks)."""
        n = len(sequences)
        total = 0.0
        acc = [np.zeros_like(p) for _, p in self.parameters()]
        for inputs, targets in sequences:
            loss, grads = self.sequence_loss_and_grads(inputs, targets)
            total += loss
            for a, g in zip(acc, grads):
                a += g / n
        return total / n, acc

    def train(
        self,
        sequences: list[tuple[np.ndarray, np.ndarray]],
        *,
        learning_rate: float = 0.001,
        epochs: int = 1000,
        rng: np.random.Generator,
        beta1: float = 0.9,
        beta2: float = 0.999,
        epsilon: float = 1e-8,
    ) -> TrainReport:
        """Per-sequence Adam on full BPTT gradients, shuffled every epoch."""
        if not sequences:
            raise ValueError("empty sequence set")
        sequences = [
            (np.asarray(x, dtype=float), np.asarray(t, dtype=float)) for x, t in sequences
        ]
        for x, t in sequences:
            if x.shape[1] != self.input_width or t.shape[1] != self.output_width:
                raise ValueError("sequence widths do not match network widths")
        params = [p for _, p in self.parameters()]
        adam = Adam(params, learning_rate, beta1=beta1, beta2=beta2, epsilon=epsilon)
        n = len(sequences)
        losses = []
        for _ in range(epochs):
            loss_sum = 0.0
            for idx in rng.permutation(n):
                inputs, targets = sequences[idx]
                loss, grads = self.sequence_loss_and_grads(inputs, targets)
                _check_finite(loss, "LSTM training")
                loss_sum += loss
                adam.step(params, grads)
            losses.append(loss_sum / n)
        return TrainReport(epoch_losses=losses)

    def to_dict(self) -> dict:
        return {
            "kind": "lstm",
            "version": 1,
            "input_width": self.input_width,
            "hidden_width": self.hidden_width,
            "output_width": self.output_width,
            "wx": self.wx.tolist(),
            "wh": self.wh.tolist(),
            "b": self.b.tolist(),
            "wy": self.wy.tolist(),
            "by": self.by.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Lstm":
        net = cls.__new__(cls)
        net.input_width = doc["input_width"]
        net.hidden_width = doc["hidden_width"]
        net.output_width = doc["output_width"]
        net.wx = np.asarray(doc["wx"], dtype=float)
        net.wh = np.asarray(doc["wh"], dtype=float)
        net.b = np.asarray(doc["b"], dtype=float)
        net.wy = np.asarray(doc["wy"], dtype=float)
        net.by = np.asarray(doc["by"], dtype=float)
        return net


def gradient_check(
    loss_fn, params: list[np.ndarray], analytic: list[np.ndarray], epsilon: float = 1e-5
) -> float:
    """Max relative error between analytic gradients and central differences.

    Perturbs each parameter in place by +/-epsilon; the relative error
    denominator is max(|analytic|, |numeric|, 1e-8).  Intended for small
    models (a few hundred parameters).
    """
    base = loss_fn()
    if not np.isfinite(base):
        raise ValueError(f"non-finite loss in gradient check: {base}")
    worst = 0.0
    for p, g in zip(params, analytic):
        flat_p = p.reshape(-1)
        flat_g = g.reshape(-1)
        for k in range(flat_p.size):
            orig = flat_p[k]
            flat_p[k] = orig + epsilon
            plus = loss_fn()
            flat_p[k] = orig - epsilon
            minus = loss_fn()
            flat_p[k] = orig
            if not (np.isfinite(plus) and np.isfinite(minus)):
                raise ValueError("non-finite loss in gradient check")
            numeric = (plus - minus) / (2.0 * epsilon)
            denom = max(abs(flat_g[k]), abs(numeric), 1e-8)
            worst = max(worst, abs(flat_g[k] - numeric) / denom)
    return worst


def mlp_gradient_check(
    net: Mlp, xs: np.ndarray, targets: np.ndarray, epsilon: float = 1e-5
) -> float:
    _, analytic = net.batch_loss_and_grads(xs, targets)
    params = [p for _, p in net.parameters()]
    return gradient_check(lambda: net.batch_loss(xs, targets), params, analytic, epsilon)


def lstm_gradient_check(
    net: Lstm, sequences: list[tuple[np.ndarray, np.ndarray]], epsilon: float = 1e-5
) -> float:
    _, analytic = net.batch_loss_and_grads(sequences)
    params = [p for _, p in net.parameters()]
    return gradient_check(lambda: net.batch_loss(sequences), params, analytic, epsilon)
