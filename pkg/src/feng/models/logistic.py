"""Multinomial softmax regression, trained with full-batch gradient descent
and backtracking line search. Deterministic, dependency-free, gradient-checkable.

Loss: mean cross-entropy + (l2/2)*||W||^2 (bias unpenalized).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_ARMIJO_C = 1e-4
_BACKTRACK = 0.5
_MAX_BACKTRACKS = 60


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


def loss_and_grad(
    weights: np.ndarray,
    bias: np.ndarray,
    X: np.ndarray,
    Y: np.ndarray,
    l2: float,
) -> tuple[float, np.ndarray, np.ndarray]:
    """Regularized log-loss with analytic gradients. Y is one-hot (n, K)."""
    n = X.shape[0]
    probs = softmax(X @ weights + bias)
    eps = 1e-300  # guards log(0); irrelevant at optimization scale
    loss = -np.sum(Y * np.log(probs + eps)) / n + 0.5 * l2 * np.sum(weights**2)
    diff = (probs - Y) / n
    grad_w = X.T @ diff + l2 * weights
    grad_b = diff.sum(axis=0)
    return float(loss), grad_w, grad_b


@dataclass
class LogisticModel:
    weights: np.ndarray
    bias: np.ndarray
    n_classes: int
    loss_history: list[float] = field(default_factory=list)

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.weights.shape[0]:
            raise ValueError(
                f"expected {self.weights.shape[0]} features, got {X.shape[1] if X.ndim == 2 else X.shape}"
            )
        return softmax(X @ self.weights + self.bias)


def train_logistic(
    X: np.ndarray,
    y: np.ndarray,
    n_classes: int,
    l2: float = 1e-3,
    max_iterations: int = 500,
    gradient_tolerance: float = 1e-6,
) -> LogisticModel:
    n, d = X.shape
    Y = np.zeros((n, n_classes))
    Y[np.arange(n), y] = 1.0
    weights = np.zeros((d, n_classes))
    bias = np.zeros(n_classes)
    history: list[float] = []
    loss, grad_w, grad_b = loss_and_grad(weights, bias, X, Y, l2)
    history.append(loss)
    for _ in range(max_iterations):
        grad_norm_sq = np.sum(grad_w**2) + np.sum(grad_b**2)
        if max(np.abs(grad_w).max(initial=0.0), np.abs(grad_b).max(initial=0.0)) < gradient_tolerance:
            break
        step = 1.0
        for _ in range(_MAX_BACKTRACKS):
            cand_w = weights - step * grad_w
            cand_b = bias - step * grad_b
            cand_loss, cand_gw, cand_gb = loss_and_grad(cand_w, cand_b, X, Y, l2)
            if cand_loss <= loss - _ARMIJO_C * step * grad_norm_sq:
                break
            step *= _BACKTRACK
        else:
            break  # no sufficient decrease at the smallest step: converged
        weights, bias = cand_w, cand_b
        loss, grad_w, grad_b = cand_loss, cand_gw, cand_gb
        history.append(loss)
    return LogisticModel(weights, bias, n_classes, history)
