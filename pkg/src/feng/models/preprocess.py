"""Preprocessing recipe: mean imputation, categorical encoding, standardization.

Fitted on training rows only. Applying a fitted preprocessor to any table
with the same schema yields a fixed-width float64 matrix with no missing
entries; categories unseen at fit time map to an explicit unknown slot.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..tabular import Column, Dtype, Table


@dataclass(frozen=True)
class _Recipe:
    column: str
    kind: str  # number | boolean | onehot | ordinal
    mean: float = 0.0
    categories: tuple[str, ...] = ()

    @property
    def width(self) -> int:
        if self.kind == "onehot":
            return len(self.categories) + 1  # + unknown slot
        return 1


def _labels(col: Column) -> list[str | None]:
    return [col.cell(i) for i in range(len(col))]


def _raw_block(recipe: _Recipe, col: Column) -> np.ndarray:
    n = len(col)
    if recipe.kind == "number":
        values = np.where(col.validity, col.values, recipe.mean)
        return values.reshape(n, 1).astype(np.float64)
    if recipe.kind == "boolean":
        values = np.where(col.validity, col.values.astype(np.float64), recipe.mean)
        return values.reshape(n, 1)
    labels = _labels(col)
    if recipe.kind == "ordinal":
        rank = {c: float(i) for i, c in enumerate(recipe.categories)}
        unknown = float(len(recipe.categories))
        return np.array(
            [rank.get(l, unknown) if l is not None else unknown for l in labels]
        ).reshape(n, 1)
    assert recipe.kind == "onehot"
    block = np.zeros((n, len(recipe.categories) + 1), dtype=np.float64)
    index = {c: i for i, c in enumerate(recipe.categories)}
    for row, label in enumerate(labels):
        block[row, index.get(label, len(recipe.categories))] = 1.0
    return block


class Preprocessor:
    """Per-column recipes plus standardization statistics from the fit table."""

    def __init__(self, recipes: list[_Recipe], means: np.ndarray, scales: np.ndarray, fitted_rows: int):
        self.recipes = recipes
        self.means = means
        self.scales = scales
        self.fitted_rows = fitted_rows

    @property
    def width(self) -> int:
        return sum(r.width for r in self.recipes)

    def transform(self, table: Table) -> np.ndarray:
        blocks = [_raw_block(r, table.column(r.column)) for r in self.recipes]
        matrix = (
            np.hstack(blocks) if blocks else np.zeros((table.row_count, 0))
        )
        return (matrix - self.means) / self.scales


def fit_preprocessor(train: Table, encoding: str = "one_hot") -> Preprocessor:
    """Build the recipe from training rows. encoding: one_hot | ordinal for
    Category columns; Text columns are always ordinal by distinct value."""
    if encoding not in ("one_hot", "ordinal"):
        raise ValueError(f"unknown encoding {encoding!r}")
    if train.row_count == 0:
        raise ValueError("cannot fit a preprocessor on an empty table")
    recipes: list[_Recipe] = []
    for col in train.feature_columns():
        if col.dtype is Dtype.NUMBER:
            valid = col.values[col.validity]
            mean = float(valid.mean()) if len(valid) else 0.0
            recipes.append(_Recipe(col.name, "number", mean=mean))
        elif col.dtype is Dtype.BOOLEAN:
            valid = col.values[col.validity].astype(np.float64)
            mean = float(valid.mean()) if len(valid) else 0.0
            recipes.append(_Recipe(col.name, "boolean", mean=mean))
        else:
            cats = tuple(sorted({l for l in _labels(col) if l is not None}))
            kind = "onehot" if (col.dtype is Dtype.CATEGORY and encoding == "one_hot") else "ordinal"
            recipes.append(_Recipe(col.name, kind, categories=cats))
    raw = (
        np.hstack([_raw_block(r, train.column(r.column)) for r in recipes])
        if recipes
        else np.zeros((train.row_count, 0))
    )
    means = raw.mean(axis=0)
    scales = raw.std(axis=0)
    scales[scales == 0.0] = 1.0
    return Preprocessor(recipes, means, scales, train.row_count)


def encode_labels(column: Column) -> tuple[np.ndarray, tuple[str, ...]]:
    """Integer class codes plus the sorted class dictionary for a target column."""
    if not column.validity.all():
        raise ValueError(f"target column {column.name!r} has missing cells")
    labels = _labels(column)
    classes = tuple(sorted(set(labels)))
    index = {c: i for i, c in enumerate(classes)}
    return np.array([index[l] for l in labels], dtype=np.int64), classes
