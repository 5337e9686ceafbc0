"""Compact CNN for 32x32 grayscale leaf tiles, plus its binary serialization.

Architecture: two conv+relu+maxpool stages, a dense residual block on the
flattened features, two relu hidden layers, and a softmax head. Small
enough to train on a laptop-class CPU in seconds, which is the point: the
node's classifier must be reproducible without accelerator hardware.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from ..sensors import CLASS_NAMES
from .layers import (
    conv2d,
    conv2d_backward,
    cross_entropy,
    dense,
    dense_backward,
    maxpool2,
    maxpool2_backward,
    relu,
    relu_backward,
    residual_dense,
    residual_dense_backward,
    softmax,
    softmax_cross_entropy_grad,
)

MAGIC = b"SCRP1\n"


def glorot_uniform(
    shape: tuple[int, ...], fan_in: int, fan_out: int, rng: np.random.Generator
) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


class LeafClassifier:
    def __init__(
        self,
        num_classes: int = len(CLASS_NAMES),
        labels: Sequence[str] | None = None,
        *,
        input_hw: int = 32,
        conv_channels: tuple[int, ...] = (4, 8),
        kernel_size: int = 3,
        residual_hidden: int = 64,
        fc_dims: tuple[int, ...] = (64, 32),
        seed: int = 0,
    ) -> None:
        if labels is None:
            labels = CLASS_NAMES if num_classes == len(CLASS_NAMES) else tuple(
                f"class_{i}" for i in range(num_classes)
            )
        if len(labels) != num_classes:
            raise ValueError("labels must match num_classes")
        if input_hw % (2 ** len(conv_channels)) != 0:
            raise ValueError("input size must survive the pooling stages")
        self.num_classes = num_classes
        self.labels = tuple(labels)
        self.input_hw = input_hw
        self.conv_channels = tuple(conv_channels)
        self.kernel_size = kernel_size
        self.residual_hidden = residual_hidden
        self.fc_dims = tuple(fc_dims)
        spatial = input_hw // (2 ** len(conv_channels))
        self.flat_dim = spatial * spatial * self.conv_channels[-1]
        self.params: dict[str, np.ndarray] = {}
        self._init_params(np.random.default_rng(seed))

    def _init_params(self, rng: np.random.Generator) -> None:
        k = self.kernel_size
        in_ch = 1
        for i, out_ch in enumerate(self.conv_channels):
            fan_in, fan_out = k * k * in_ch, k * k * out_ch
            self.params[f"conv{i}_k"] = glorot_uniform(
                (k, k, in_ch, out_ch), fan_in, fan_out, rng
            )
            self.params[f"conv{i}_b"] = np.zeros(out_ch)
            in_ch = out_ch
        d, hidden = self.flat_dim, self.residual_hidden
        self.params["res_w1"] = glorot_uniform((hidden, d), d, hidden, rng)
        self.params["res_b1"] = np.zeros(hidden)
        self.params["res_w2"] = glorot_uniform((d, hidden), hidden, d, rng)
        self.params["res_b2"] = np.zeros(d)
        dims = (d, *self.fc_dims, self.num_classes)
        for i, (n_in, n_out) in enumerate(zip(dims, dims[1:])):
            name = "out" if i == len(dims) - 2 else f"fc{i}"
            self.params[f"{name}_w"] = glorot_uniform((n_out, n_in), n_in, n_out, rng)
            self.params[f"{name}_b"] = np.zeros(n_out)

    @property
    def param_names(self) -> list[str]:
        return sorted(self.params)

    def _check_input(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim == 2:
            x = x[:, :, None]
        if x.shape != (self.input_hw, self.input_hw, 1):
            raise ValueError(
                f"expected ({self.input_hw}, {self.input_hw}, 1) input, got {x.shape}"
            )
        return x

    def forward(self, x: np.ndarray) -> tuple[np.ndarray, dict[str, np.ndarray]]:
        """Class probabilities plus the intermediates backward needs."""
        a = self._check_input(x)
        cache: dict[str, np.ndarray] = {"x0": a}
        for i in range(len(self.conv_channels)):
            z = conv2d(a, self.params[f"conv{i}_k"], self.params[f"conv{i}_b"])
            r = relu(z)
            cache[f"conv{i}_in"] = a
            cache[f"conv{i}_z"] = z
            cache[f"conv{i}_r"] = r
            a = maxpool2(r)
        flat = a.reshape(-1)
        cache["pooled"] = a
        cache["flat"] = flat
        res_out = residual_dense(
            flat,
            self.params["res_w1"],
            self.params["res_b1"],
            self.params["res_w2"],
            self.params["res_b2"],
        )
        cache["res_out"] = res_out
        h = res_out
        for i in range(len(self.fc_dims)):
            z = dense(h, self.params[f"fc{i}_w"], self.params[f"fc{i}_b"])
            cache[f"fc{i}_in"] = h
            cache[f"fc{i}_z"] = z
            h = relu(z)
        cache["out_in"] = h
        logits = dense(h, self.params["out_w"], self.params["out_b"])
        cache["logits"] = logits
        return softmax(logits), cache

    def predict(self, x: np.ndarray) -> tuple[str, float, np.ndarray]:
        probs, _ = self.forward(x)
        idx = int(np.argmax(probs))
        return self.labels[idx], float(probs[idx]), probs

    def conv_activation(self, x: np.ndarray) -> np.ndarray:
        """Post-relu feature map of the last conv stage, for localization."""
        _, cache = self.forward(x)
        return cache[f"conv{len(self.conv_channels) - 1}_r"]

    def loss_and_grads(
        self, x: np.ndarray, target: int
    ) -> tuple[float, dict[str, np.ndarray]]:
        """Cross-entropy loss and its gradient for every parameter."""
        if not 0 <= target < self.num_classes:
            raise ValueError(f"target must lie in 0..{self.num_classes - 1}")
        probs, cache = self.forward(x)
        loss = cross_entropy(probs, target)
        grads: dict[str, np.ndarray] = {}

        g = softmax_cross_entropy_grad(probs, target)
        g, grads["out_w"], grads["out_b"] = dense_backward(
            g, cache["out_in"], self.params["out_w"]
        )
        for i in reversed(range(len(self.fc_dims))):
            g = relu_backward(g, cache[f"fc{i}_z"])
            g, grads[f"fc{i}_w"], grads[f"fc{i}_b"] = dense_backward(
                g, cache[f"fc{i}_in"], self.params[f"fc{i}_w"]
            )
        (
            g,
            grads["res_w1"],
            grads["res_b1"],
            grads["res_w2"],
            grads["res_b2"],
        ) = residual_dense_backward(
            g,
            cache["flat"],
            self.params["res_w1"],
            self.params["res_b1"],
            self.params["res_w2"],
        )
        g = g.reshape(cache["pooled"].shape)
        for i in reversed(range(len(self.conv_channels))):
            g = maxpool2_backward(g, cache[f"conv{i}_r"])
            g = relu_backward(g, cache[f"conv{i}_z"])
            g, grads[f"conv{i}_k"], grads[f"conv{i}_b"] = conv2d_backward(
                g, cache[f"conv{i}_in"], self.params[f"conv{i}_k"]
            )
        return loss, grads

    def sgd_step(self, grads: Mapping[str, np.ndarray], lr: float) -> None:
        """Plain SGD with a fixed learning rate, no momentum or decay."""
        for name, grad in grads.items():
            self.params[name] -= lr * grad

    def config(self) -> dict:
        return {
            "num_classes": self.num_classes,
            "labels": list(self.labels),
            "input_hw": self.input_hw,
            "conv_channels": list(self.conv_channels),
            "kernel_size": self.kernel_size,
            "residual_hidden": self.residual_hidden,
            "fc_dims": list(self.fc_dims),
        }


def save_model(model: LeafClassifier, path: str | Path) -> None:
    """Write magic + JSON header + raw float64 parameter payload."""
    header = {
        "config": model.config(),
        "params": [
            {"name": name, "shape": list(model.params[name].shape)}
            for name in model.param_names
        ],
    }
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(json.dumps(header, separators=(",", ":")).encode("utf-8"))
        fh.write(b"\n")
        for name in model.param_names:
            fh.write(np.ascontiguousarray(model.params[name], dtype=np.float64).tobytes())


def load_model(path: str | Path) -> LeafClassifier:
    data = Path(path).read_bytes()
    if not data.startswith(MAGIC):
        raise ValueError("not a recognized model file")
    newline = data.index(b"\n", len(MAGIC))
    header = json.loads(data[len(MAGIC) : newline])
    cfg = header["config"]
    model = LeafClassifier(
        num_classes=cfg["num_classes"],
        labels=cfg["labels"],
        input_hw=cfg["input_hw"],
        conv_channels=tuple(cfg["conv_channels"]),
        kernel_size=cfg["kernel_size"],
        residual_hidden=cfg["residual_hidden"],
        fc_dims=tuple(cfg["fc_dims"]),
    )
    offset = newline + 1
    for spec in header["params"]:
        shape = tuple(spec["shape"])
        count = int(np.prod(shape)) if shape else 1
        values = np.frombuffer(data, dtype=np.float64, count=count, offset=offset)
        if values.size != count:
            raise ValueError("truncated parameter payload")
        model.params[spec["name"]] = values.reshape(shape).copy()
        offset += count * 8
    if offset != len(data):
        raise ValueError("trailing bytes after parameter payload")
    return model
