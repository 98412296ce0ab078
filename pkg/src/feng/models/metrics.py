"""Accuracy and ROC AUC (binary, and mean pairwise one-vs-one for multiclass).

Ties count 0.5. For more than two classes the score is the average of
AUC(i, j) over unordered class pairs, restricted to rows of classes i and j,
using score column i as the positive score.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np


class UndefinedMetricError(ValueError):
    """Raised when a metric is undefined, e.g. AUC with one class present."""


@dataclass(frozen=True)
class EvalMetrics:
    roc_auc: float
    accuracy: float


def _binary_auc(scores: np.ndarray, positive: np.ndarray) -> float:
    """Mann-Whitney AUC with midranks, so exact ties earn 0.5 credit."""
    n_pos = int(positive.sum())
    n_neg = len(positive) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError("AUC needs both classes present")
    order = np.argsort(scores, kind="stable")
    ranks = np.empty(len(scores), dtype=np.float64)
    sorted_scores = scores[order]
    i = 0
    while i < len(scores):
        j = i
        while j + 1 < len(scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0  # midrank, 1-based
        i = j + 1
    rank_sum = ranks[positive].sum()
    return float((rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def roc_auc(scores: np.ndarray, labels: np.ndarray) -> float:
    """scores: (n, K) class-probability matrix, or a 1-D positive-class score
    vector for the binary case (positive = class 1)."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    present = np.unique(labels)
    if len(present) < 2:
        raise UndefinedMetricError("AUC needs at least 2 distinct labels")
    if scores.ndim == 1:
        return _binary_auc(scores, labels == present.max())
    if scores.shape[1] == 2:
        return _binary_auc(scores[:, 1], labels == 1)
    total = 0.0
    pairs = list(combinations(sorted(int(c) for c in present), 2))
    for i, j in pairs:
        rows = (labels == i) | (labels == j)
        total += _binary_auc(scores[rows, i], labels[rows] == i)
    return total / len(pairs)


def accuracy(scores: np.ndarray, labels: np.ndarray) -> float:
    """Fraction of rows whose argmax class (ties to the lowest index) matches."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    predicted = np.argmax(scores, axis=1)
    return float(np.mean(predicted == labels))


def evaluate_scores(scores: np.ndarray, labels: np.ndarray) -> EvalMetrics:
    return EvalMetrics(roc_auc(scores, labels), accuracy(scores, labels))
