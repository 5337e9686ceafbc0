"""Synthetic leaf dataset generation and deterministic splitting."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..sensors import capture_leaf
from .pipeline import preprocess

# spreads per-sample seeds far apart so camera RNG streams never collide
_SEED_STRIDE = 100003


def generate_leaf_dataset(
    per_class: int = 100,
    seed: int = 0,
    classes: Sequence[int] = (0, 1, 2, 3),
) -> tuple[np.ndarray, np.ndarray]:
    """Preprocessed tiles X (N, 32, 32, 1) and labels y (N,), class-balanced.

    Samples cycle through the classes so any prefix stays roughly balanced.
    The same (per_class, seed, classes) always yields the same arrays.
    """
    if per_class <= 0:
        raise ValueError("per_class must be positive")
    total = per_class * len(classes)
    xs = np.zeros((total, 32, 32, 1))
    ys = np.zeros(total, dtype=int)
    for i in range(total):
        class_id = classes[i % len(classes)]
        frame = capture_leaf(seed * _SEED_STRIDE + i, class_id)
        xs[i] = preprocess(frame)
        ys[i] = class_id
    return xs, ys


def split_dataset(
    xs: np.ndarray,
    ys: np.ndarray,
    holdout_fraction: float = 0.25,
    seed: int = 0,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Shuffled (X_train, y_train, X_test, y_test) split, reproducible by seed."""
    if not 0.0 < holdout_fraction < 1.0:
        raise ValueError("holdout_fraction must lie in (0, 1)")
    n = len(xs)
    if len(ys) != n:
        raise ValueError("xs and ys must be the same length")
    perm = np.random.default_rng(seed).permutation(n)
    n_test = max(1, round(n * holdout_fraction))
    test, train = perm[:n_test], perm[n_test:]
    return xs[train], ys[train], xs[test], ys[test]
