"""Central-difference validation of the analytic gradients.

Runs a scaled-down model so the finite-difference sweep stays fast while
still exercising every layer type (conv, pool, residual, dense, softmax).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .layers import cross_entropy
from .model import LeafClassifier

PASS_THRESHOLD = 1e-4


@dataclass(frozen=True)
class GradCheckReport:
    max_rel_error: float
    worst_param: str
    per_param: dict[str, float]
    samples: int
    skipped: int
    passed: bool


def _loss(model: LeafClassifier, x: np.ndarray, target: int) -> float:
    probs, _ = model.forward(x)
    return cross_entropy(probs, target)


def tiny_model(seed: int = 0) -> LeafClassifier:
    return LeafClassifier(
        num_classes=3,
        labels=("a", "b", "c"),
        input_hw=8,
        conv_channels=(2, 3),
        residual_hidden=5,
        fc_dims=(6, 4),
        seed=seed,
    )


def grad_check(
    model: LeafClassifier | None = None,
    *,
    seed: int = 0,
    samples_per_param: int = 8,
    epsilon: float = 1e-5,
) -> GradCheckReport:
    """Compare analytic gradients against central finite differences.

    Relative error uses max(|analytic|, |numeric|, 1e-6) as denominator so
    near-zero gradients do not blow the ratio up. Central differences are
    invalid where the loss has a kink (ReLU corner, pooling tie) inside the
    probe interval: there the two one-sided slopes disagree by a finite
    amount, so any coordinate whose forward and backward differences are
    inconsistent is skipped rather than scored.
    """
    if model is None:
        model = tiny_model(seed)
    rng = np.random.default_rng(seed + 1)
    x = rng.uniform(0.05, 0.95, size=(model.input_hw, model.input_hw, 1))
    target = int(rng.integers(model.num_classes))

    _, grads = model.loss_and_grads(x, target)
    loss_center = _loss(model, x, target)
    per_param: dict[str, float] = {}
    samples = 0
    skipped = 0
    for name in model.param_names:
        flat = model.params[name].reshape(-1)
        grad_flat = grads[name].reshape(-1)
        if flat.size <= samples_per_param:
            indices = np.arange(flat.size)
        else:
            indices = rng.choice(flat.size, size=samples_per_param, replace=False)
        worst = 0.0
        for idx in indices:
            original = flat[idx]
            flat[idx] = original + epsilon
            loss_hi = _loss(model, x, target)
            flat[idx] = original - epsilon
            loss_lo = _loss(model, x, target)
            flat[idx] = original
            forward = (loss_hi - loss_center) / epsilon
            backward = (loss_center - loss_lo) / epsilon
            if abs(forward - backward) > 0.25 * max(abs(forward), abs(backward), 1e-6):
                skipped += 1
                continue
            numeric = (loss_hi - loss_lo) / (2.0 * epsilon)
            analytic = grad_flat[idx]
            rel = abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1e-6)
            worst = max(worst, rel)
            samples += 1
        per_param[name] = worst

    worst_param = max(per_param, key=per_param.get)
    max_rel = per_param[worst_param]
    return GradCheckReport(
        max_rel_error=max_rel,
        worst_param=worst_param,
        per_param=per_param,
        samples=samples,
        skipped=skipped,
        passed=max_rel <= PASS_THRESHOLD and samples > 0,
    )
