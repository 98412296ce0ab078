"""Downstream classifiers with the shared preprocessing recipe and metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .forest import ForestModel, train_forest
from .logistic import LogisticModel, loss_and_grad, softmax, train_logistic
from .metrics import EvalMetrics, UndefinedMetricError, accuracy, evaluate_scores, roc_auc
from .preprocess import Preprocessor, encode_labels, fit_preprocessor

KINDS = ("logistic_regression", "random_forest")


@dataclass(frozen=True)
class ModelSpec:
    kind: str = "logistic_regression"
    rng_seed: int = 0
    # logistic regression
    l2_penalty: float = 1e-3
    max_iterations: int = 500
    gradient_tolerance: float = 1e-6
    # random forest
    n_trees: int = 50
    max_depth: int = 8
    min_leaf: int = 2

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.l2_penalty < 0 or self.max_iterations < 1 or self.gradient_tolerance <= 0:
            raise ValueError("invalid logistic-regression hyperparameters")
        if self.n_trees < 1 or self.max_depth < 1 or self.min_leaf < 1:
            raise ValueError("invalid random-forest hyperparameters")

    @property
    def encoding(self) -> str:
        # trees consume ordinals natively; the linear model needs one-hot
        return "one_hot" if self.kind == "logistic_regression" else "ordinal"


def train(spec: ModelSpec, X: np.ndarray, y: np.ndarray, n_classes: int | None = None):
    """Fit the classifier named by spec; deterministic in spec.rng_seed."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] != len(y):
        raise ValueError(f"dimension mismatch: X {X.shape}, y {y.shape}")
    if not np.isfinite(X).all():
        raise ValueError("non-finite inputs")
    if len(y) == 0:
        raise ValueError("empty training set")
    k = n_classes if n_classes is not None else int(y.max()) + 1
    if y.min() < 0 or y.max() >= k:
        raise ValueError("labels out of range")
    if spec.kind == "logistic_regression":
        return train_logistic(
            X,
            y,
            k,
            l2=spec.l2_penalty,
            max_iterations=spec.max_iterations,
            gradient_tolerance=spec.gradient_tolerance,
        )
    return train_forest(
        X,
        y,
        k,
        rng_seed=spec.rng_seed,
        n_trees=spec.n_trees,
        max_depth=spec.max_depth,
        min_leaf=spec.min_leaf,
    )


__all__ = [
    "ModelSpec",
    "train",
    "LogisticModel",
    "ForestModel",
    "train_logistic",
    "train_forest",
    "loss_and_grad",
    "softmax",
    "Preprocessor",
    "fit_preprocessor",
    "encode_labels",
    "EvalMetrics",
    "UndefinedMetricError",
    "roc_auc",
    "accuracy",
    "evaluate_scores",
]
