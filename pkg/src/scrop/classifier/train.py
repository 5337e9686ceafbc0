"""Online SGD training loop and evaluation for the leaf classifier."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

import numpy as np

from .model import LeafClassifier


@dataclass
class TrainingHistory:
    epoch_losses: list[float] = field(default_factory=list)
    epoch_accuracies: list[float] = field(default_factory=list)

    @property
    def final_loss(self) -> float:
        return self.epoch_losses[-1]

    @property
    def final_accuracy(self) -> float:
        return self.epoch_accuracies[-1]


def train(
    model: LeafClassifier,
    xs: np.ndarray,
    ys: np.ndarray,
    *,
    epochs: int = 25,
    lr: float = 0.01,
    seed: int = 0,
    log: Optional[Callable[[str], None]] = None,
) -> TrainingHistory:
    """Per-sample SGD with a fixed learning rate.

    Sample order is reshuffled every epoch from a dedicated RNG, so training
    is deterministic for a given (model seed, data, seed) triple. Keep lr
    near the 0.01 default: much larger values push the early shared-bias
    gradient past the activation scale and the ReLU stack dies.
    """
    if len(xs) != len(ys) or len(xs) == 0:
        raise ValueError("training set must be non-empty and aligned")
    if epochs < 0:
        raise ValueError("epochs must be non-negative")
    if lr <= 0:
        raise ValueError("lr must be positive")
    # epochs=0 is a no-op by contract: the model comes back untouched
    rng = np.random.default_rng(seed)
    history = TrainingHistory()
    for epoch in range(epochs):
        order = rng.permutation(len(xs))
        total_loss = 0.0
        correct = 0
        for i in order:
            loss, grads = model.loss_and_grads(xs[i], int(ys[i]))
            model.sgd_step(grads, lr)
            total_loss += loss
        for i in range(len(xs)):
            probs, _ = model.forward(xs[i])
            correct += int(np.argmax(probs)) == int(ys[i])
        history.epoch_losses.append(total_loss / len(xs))
        history.epoch_accuracies.append(correct / len(xs))
        if log is not None:
            log(
                f"epoch {epoch + 1}/{epochs} "
                f"loss {history.epoch_losses[-1]:.4f} "
                f"train_acc {history.epoch_accuracies[-1]:.3f}"
            )
    return history


@dataclass(frozen=True)
class ConfusionMatrix:
    """Rows are actual classes, columns are predicted classes."""

    counts: np.ndarray
    labels: tuple[str, ...]

    @classmethod
    def from_pairs(
        cls, pairs: Iterable[tuple[int, int]], labels: Iterable[str]
    ) -> "ConfusionMatrix":
        labels = tuple(labels)
        counts = np.zeros((len(labels), len(labels)), dtype=int)
        for actual, predicted in pairs:
            counts[actual, predicted] += 1
        return cls(counts=counts, labels=labels)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def accuracy(self) -> float:
        total = self.total
        return float(np.trace(self.counts)) / total if total else 0.0

    def recall(self, class_index: int) -> float:
        row = self.counts[class_index].sum()
        return float(self.counts[class_index, class_index]) / row if row else 0.0

    def precision(self, class_index: int) -> float:
        col = self.counts[:, class_index].sum()
        return float(self.counts[class_index, class_index]) / col if col else 0.0

    def to_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "counts": self.counts.tolist(),
            "accuracy": self.accuracy,
        }


def evaluate(model: LeafClassifier, xs: np.ndarray, ys: np.ndarray) -> ConfusionMatrix:
    pairs = []
    for i in range(len(xs)):
        probs, _ = model.forward(xs[i])
        pairs.append((int(ys[i]), int(np.argmax(probs))))
    return ConfusionMatrix.from_pairs(pairs, model.labels)
