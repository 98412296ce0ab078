"""Random forest: Gini decision trees over bootstrap samples with sqrt(d)
feature subsampling per split. Vote probabilities are hard-vote fractions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class _Node:
    leaf_class: int = -1
    feature: int = -1
    threshold: float = 0.0
    left: "_Node | None" = None
    right: "_Node | None" = None


def _gini_split_cost(y_sorted: np.ndarray, n_classes: int) -> tuple[np.ndarray, np.ndarray]:
    """Weighted Gini for every split position of a class sequence sorted by
    feature value. Position k splits into [:k] and [k:]."""
    n = len(y_sorted)
    onehot = np.zeros((n, n_classes))
    onehot[np.arange(n), y_sorted] = 1.0
    left = np.cumsum(onehot, axis=0)  # counts in [:k] at row k-1
    total = left[-1]
    sizes_l = np.arange(1, n + 1, dtype=np.float64)
    sizes_r = n - sizes_l
    with np.errstate(invalid="ignore", divide="ignore"):
        gini_l = 1.0 - np.sum((left / sizes_l[:, None]) ** 2, axis=1)
        right = total - left
        gini_r = 1.0 - np.sum((right / np.maximum(sizes_r, 1.0)[:, None]) ** 2, axis=1)
    cost = (sizes_l * gini_l + sizes_r * gini_r) / n
    return cost, sizes_l


class _TreeBuilder:
    def __init__(self, X, y, n_classes, max_depth, min_leaf, n_features_per_split, rng):
        self.X = X
        self.y = y
        self.n_classes = n_classes
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.m = n_features_per_split
        self.rng = rng

    def _leaf(self, idx: np.ndarray) -> _Node:
        counts = np.bincount(self.y[idx], minlength=self.n_classes)
        return _Node(leaf_class=int(np.argmax(counts)))  # ties: lowest class index

    def build(self, idx: np.ndarray, depth: int) -> _Node:
        y = self.y[idx]
        if (
            depth >= self.max_depth
            or len(idx) < 2 * self.min_leaf
            or np.all(y == y[0])
        ):
            return self._leaf(idx)
        features = self.rng.choice(self.X.shape[1], size=self.m, replace=False)
        best = (np.inf, -1, 0.0)
        for f in np.sort(features):
            values = self.X[idx, f]
            order = np.argsort(values, kind="stable")
            v_sorted = values[order]
            cost, sizes_l = _gini_split_cost(y[order], self.n_classes)
            # splits only between distinct neighbours, with min_leaf both sides
            ok = (
                (v_sorted[:-1] < v_sorted[1:])
                & (sizes_l[:-1] >= self.min_leaf)
                & (sizes_l[:-1] <= len(idx) - self.min_leaf)
            )
            positions = np.flatnonzero(ok)
            if len(positions) == 0:
                continue
            costs_here = cost[positions]
            k = positions[int(np.argmin(costs_here))]
            if cost[k] < best[0]:
                threshold = (v_sorted[k] + v_sorted[k + 1]) / 2.0
                best = (float(cost[k]), int(f), float(threshold))
        if best[1] < 0:
            return self._leaf(idx)
        _, feature, threshold = best
        mask = self.X[idx, feature] <= threshold
        node = _Node(feature=feature, threshold=threshold)
        node.left = self.build(idx[mask], depth + 1)
        node.right = self.build(idx[~mask], depth + 1)
        return node


def _predict_tree(node: _Node, X: np.ndarray) -> np.ndarray:
    out = np.empty(len(X), dtype=np.int64)
    stack = [(node, np.arange(len(X)))]
    while stack:
        nd, idx = stack.pop()
        if len(idx) == 0:
            continue
        if nd.left is None:
            out[idx] = nd.leaf_class
            continue
        mask = X[idx, nd.feature] <= nd.threshold
        stack.append((nd.left, idx[mask]))
        stack.append((nd.right, idx[~mask]))
    return out


@dataclass
class ForestModel:
    trees: list[_Node]
    n_classes: int
    n_features: int

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise ValueError(
                f"expected {self.n_features} features, got {X.shape[1] if X.ndim == 2 else X.shape}"
            )
        votes = np.zeros((len(X), self.n_classes))
        for tree in self.trees:
            pred = _predict_tree(tree, X)
            votes[np.arange(len(X)), pred] += 1.0
        return votes / len(self.trees)


def train_forest(
    X: np.ndarray,
    y: np.ndarray,
    n_classes: int,
    rng_seed: int = 0,
    n_trees: int = 50,
    max_depth: int = 8,
    min_leaf: int = 2,
) -> ForestModel:
    n, d = X.shape
    m = max(1, int(round(np.sqrt(d))))
    seeds = np.random.SeedSequence(rng_seed).spawn(n_trees)
    trees = []
    for ss in seeds:
        rng = np.random.default_rng(ss)
        bootstrap = rng.integers(0, n, size=n)
        builder = _TreeBuilder(X, y, n_classes, max_depth, min_leaf, m, rng)
        trees.append(builder.build(bootstrap, 0))
    return ForestModel(trees, n_classes, d)
