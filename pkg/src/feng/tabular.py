"""Columnar dataset model: typed columns with validity masks, CSV I/O, summaries, splits.

A Table is an immutable, ordered collection of equally long Columns plus the
name of the prediction target. Missing cells are tracked with an explicit
boolean validity mask (False = missing), never with sentinel values. All
numeric data uses float64 semantics.
"""

from __future__ import annotations

import csv
import hashlib
import re
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

import numpy as np

__all__ = [
    "Dtype",
    "Column",
    "Table",
    "SplitPlan",
    "SplitResult",
    "TabularError",
    "load_csv",
    "write_csv",
    "summarize",
    "ColumnSummary",
    "render_summary_line",
    "make_splits",
    "gen_tictactoe",
    "tables_equal",
]


class TabularError(ValueError):
    """Raised for malformed CSV input or inconsistent table construction."""


class Dtype(Enum):
    NUMBER = "Number"
    BOOLEAN = "Boolean"
    CATEGORY = "Category"
    TEXT = "Text"

    @property
    def display(self) -> str:
        # Names shown in prompt column summaries. Categoricals are announced
        # as int to match the encoded presentation downstream models expect.
        return {
            Dtype.NUMBER: "float",
            Dtype.BOOLEAN: "bool",
            Dtype.CATEGORY: "int",
            Dtype.TEXT: "string",
        }[self]


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Column:
    """One named, typed column: a value array plus a validity mask.

    Payloads at invalid positions are unspecified and never compared.
    Category columns carry their label dictionary in `categories`.
    """

    name: str
    dtype: Dtype
    values: np.ndarray
    validity: np.ndarray
    categories: tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.values) != len(self.validity):
            raise TabularError(
                f"column {self.name!r}: values and validity lengths differ"
            )
        _frozen(self.values)
        _frozen(self.validity)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def missing_fraction(self) -> float:
        n = len(self)
        return 0.0 if n == 0 else float(np.count_nonzero(~self.validity)) / n

    def cell(self, i: int):
        """Cell as a plain Python value; None when missing."""
        if not self.validity[i]:
            return None
        v = self.values[i]
        if self.dtype is Dtype.NUMBER:
            return float(v)
        if self.dtype is Dtype.BOOLEAN:
            return bool(v)
        return str(v)

    def take(self, indices: np.ndarray) -> "Column":
        return Column(
            self.name,
            self.dtype,
            self.values[indices].copy(),
            self.validity[indices].copy(),
            self.categories,
        )

    def renamed(self, name: str) -> "Column":
        return replace(self, name=name)


def make_column(name: str, dtype: Dtype, cells: list) -> Column:
    """Build a Column from Python cell values; None marks a missing cell."""
    validity = np.array([c is not None for c in cells], dtype=bool)
    if dtype is Dtype.NUMBER:
        values = np.array(
            [float(c) if c is not None else np.nan for c in cells], dtype=np.float64
        )
        finite = np.isfinite(values)
        validity &= finite
    elif dtype is Dtype.BOOLEAN:
        values = np.array([bool(c) for c in cells], dtype=bool)
    else:
        values = np.array(
            ["" if c is None else str(c) for c in cells], dtype=object
        )
    categories: tuple[str, ...] = ()
    if dtype is Dtype.CATEGORY:
        categories = tuple(sorted({str(c) for c, ok in zip(cells, validity) if ok}))
    return Column(name, dtype, values, validity, categories)


@dataclass(frozen=True)
class Table:
    """Ordered columns with unique names; `target` names the prediction column."""

    columns: tuple[Column, ...]
    target: str

    def __post_init__(self):
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise TabularError(f"duplicate column names: {dupes}")
        if self.target not in names:
            raise TabularError(f"target column {self.target!r} not present")
        lengths = {len(c) for c in self.columns}
        if len(lengths) > 1:
            raise TabularError(f"column lengths differ: {sorted(lengths)}")
        tgt = self.column(self.target)
        if tgt.dtype not in (Dtype.CATEGORY, Dtype.BOOLEAN):
            raise TabularError(
                f"target column {self.target!r} must be Category or Boolean, "
                f"got {tgt.dtype.value}"
            )

    @property
    def row_count(self) -> int:
        return len(self.columns[0]) if self.columns else 0

    @property
    def column_names(self) -> list[str]:
        return [c.name for c in self.columns]

    def column(self, name: str) -> Column:
        for c in self.columns:
            if c.name == name:
                return c
        raise KeyError(name)

    def schema(self) -> dict[str, Dtype]:
        return {c.name: c.dtype for c in self.columns}

    def feature_columns(self) -> list[Column]:
        return [c for c in self.columns if c.name != self.target]

    def with_column(self, col: Column) -> "Table":
        if col.name in self.column_names:
            raise TabularError(f"column {col.name!r} already exists")
        return Table(self.columns + (col,), self.target)

    def without_column(self, name: str) -> "Table":
        if name == self.target:
            raise TabularError("cannot drop the target column")
        if name not in self.column_names:
            raise KeyError(name)
        return Table(tuple(c for c in self.columns if c.name != name), self.target)

    def take(self, indices: np.ndarray) -> "Table":
        return Table(tuple(c.take(indices) for c in self.columns), self.target)

    def renamed_positionally(self, names: list[str]) -> "Table":
        if len(names) != len(self.columns):
            raise TabularError("rename list length mismatch")
        tgt_idx = self.column_names.index(self.target)
        cols = tuple(c.renamed(n) for c, n in zip(self.columns, names))
        return Table(cols, names[tgt_idx])

    def content_hash(self) -> str:
        """Stable digest over names, dtypes, and valid cell contents."""
        h = hashlib.sha256()
        h.update(self.target.encode())
        for c in self.columns:
            h.update(c.name.encode())
            h.update(c.dtype.value.encode())
            for i in range(len(c)):
                v = c.cell(i)
                h.update(b"\x00" if v is None else _canonical_cell(c.dtype, v).encode())
            h.update(b"\x01")
        return h.hexdigest()


def _canonical_cell(dtype: Dtype, value) -> str:
    if dtype is Dtype.NUMBER:
        return repr(float(value))
    if dtype is Dtype.BOOLEAN:
        return "true" if value else "false"
    return str(value)


def tables_equal(a: Table, b: Table) -> bool:
    """Cell-for-cell equality: names, dtypes, masks, and valid cell payloads."""
    if a.target != b.target or a.column_names != b.column_names:
        return False
    if a.row_count != b.row_count:
        return False
    for ca, cb in zip(a.columns, b.columns):
        if ca.dtype != cb.dtype or not np.array_equal(ca.validity, cb.validity):
            return False
        for i in np.flatnonzero(ca.validity):
            if ca.cell(int(i)) != cb.cell(int(i)):
                return False
    return True


# ---------------------------------------------------------------------------
# CSV ingestion
# ---------------------------------------------------------------------------

_BOOL_TOKENS = {"true", "false", "0", "1"}
_TRUE_TOKENS = {"true", "1"}


def _parses_as_number(text: str) -> bool:
    try:
        v = float(text)
    except ValueError:
        return False
    return np.isfinite(v)


def infer_dtype(raw_cells: list[str | None], row_count: int) -> Dtype:
    """Dtype inference over raw string cells (None = empty field).

    Number if every non-empty cell parses as a decimal number; else Boolean if
    the value set is within {true,false,0,1} case-insensitively; else Category
    when the distinct count is at most max(20, 5% of rows); else Text.
    """
    present = [c for c in raw_cells if c is not None]
    if present and all(_parses_as_number(c) for c in present):
        return Dtype.NUMBER
    lowered = {c.lower() for c in present}
    if present and lowered <= _BOOL_TOKENS:
        return Dtype.BOOLEAN
    if len(set(present)) <= max(20, 0.05 * row_count):
        return Dtype.CATEGORY
    return Dtype.TEXT


def _cells_from_raw(raw_cells: list[str | None], dtype: Dtype) -> list:
    out = []
    for c in raw_cells:
        if c is None:
            out.append(None)
        elif dtype is Dtype.NUMBER:
            out.append(float(c))
        elif dtype is Dtype.BOOLEAN:
            out.append(c.lower() in _TRUE_TOKENS)
        else:
            out.append(c)
    return out


def parse_schema_override(path: str | Path) -> dict[str, Dtype]:
    """Read a `column=dtype` per line override file."""
    overrides: dict[str, Dtype] = {}
    by_name = {d.value.lower(): d for d in Dtype}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise TabularError(f"schema override line {lineno}: expected column=dtype")
        name, _, dtype_text = line.partition("=")
        key = dtype_text.strip().lower()
        if key not in by_name:
            raise TabularError(
                f"schema override line {lineno}: unknown dtype {dtype_text.strip()!r}"
            )
        overrides[name.strip()] = by_name[key]
    return overrides


def load_csv(
    path: str | Path,
    target: str,
    schema_override: dict[str, Dtype] | None = None,
) -> Table:
    """Load an RFC-4180-style CSV with a header row. Empty fields become missing."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise TabularError(f"{path}: empty file, header row required") from None
        if len(set(header)) != len(header):
            dupes = sorted({h for h in header if header.count(h) > 1})
            raise TabularError(f"{path}: duplicate header names: {dupes}")
        rows = []
        for lineno, row in enumerate(reader, 2):
            if len(row) != len(header):
                raise TabularError(
                    f"{path}: line {lineno}: expected {len(header)} fields, got {len(row)}"
                )
            rows.append(row)
    if target not in header:
        raise TabularError(f"{path}: target column {target!r} not in header")
    override = schema_override or {}
    columns = []
    for j, name in enumerate(header):
        raw = [row[j] if row[j] != "" else None for row in rows]
        dtype = override.get(name) or infer_dtype(raw, len(rows))
        if name == target and name not in override and dtype in (Dtype.NUMBER, Dtype.TEXT):
            # the prediction column is a class label by definition; keep the
            # raw strings (e.g. "0"/"1") as category labels
            dtype = Dtype.CATEGORY
        columns.append(make_column(name, dtype, _cells_from_raw(raw, dtype)))
    return Table(tuple(columns), target)


def write_csv(table: Table, path: str | Path) -> None:
    """Write a Table so that re-loading reproduces it cell-for-cell."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(table.column_names)
        for i in range(table.row_count):
            writer.writerow(
                [
                    ""
                    if (v := c.cell(i)) is None
                    else _canonical_cell(c.dtype, v)
                    for c in table.columns
                ]
            )


# ---------------------------------------------------------------------------
# Summaries
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ColumnSummary:
    name: str
    dtype: Dtype
    missing_fraction: float
    samples: tuple  # aligned across columns; None marks a sampled missing cell


def summarize(table: Table, n_samples: int, rng_seed: int) -> list[ColumnSummary]:
    """Per-column dtype, missing fraction, and row-aligned sampled values.

    The same row indices (drawn without replacement, deterministic in
    rng_seed) are used for every column.
    """
    if n_samples > table.row_count:
        raise TabularError(
            f"n_samples {n_samples} exceeds row count {table.row_count}"
        )
    rng = np.random.default_rng(rng_seed)
    idx = rng.choice(table.row_count, size=n_samples, replace=False) if n_samples else []
    return [
        ColumnSummary(
            c.name,
            c.dtype,
            c.missing_fraction,
            tuple(c.cell(int(i)) for i in idx),
        )
        for c in table.columns
    ]


def format_number(v: float) -> str:
    """Up to 6 significant digits, always marked as a float (126.0, not 126)."""
    text = f"{v:.6g}"
    if "." not in text and "e" not in text and "inf" not in text and "nan" not in text:
        text += ".0"
    return text


def format_sample(value, dtype: Dtype) -> str:
    if value is None:
        return "NaN"
    if dtype is Dtype.NUMBER:
        return format_number(value)
    if dtype is Dtype.BOOLEAN:
        return "true" if value else "false"
    return repr(str(value))


def render_summary_line(summary: ColumnSummary, max_samples: int | None = None) -> str:
    samples = summary.samples
    if max_samples is not None:
        samples = samples[:max_samples]
    rendered = ", ".join(format_sample(v, summary.dtype) for v in samples)
    return (
        f"{summary.name} ({summary.dtype.display}): "
        f"NaN-freq [{summary.missing_fraction * 100:.1f}%], Samples [{rendered}]"
    )


# ---------------------------------------------------------------------------
# Splits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SplitPlan:
    seed: int
    n_splits: int = 10
    valid_fraction: float = 0.3
    stratified: bool = True

    def __post_init__(self):
        if self.n_splits < 1:
            raise TabularError("n_splits must be >= 1")
        if not 0.0 < self.valid_fraction < 1.0:
            raise TabularError("valid_fraction must be in (0, 1)")


@dataclass(frozen=True)
class SplitResult:
    splits: tuple[tuple[np.ndarray, np.ndarray], ...]
    stratified: bool
    warning: str | None = None


def _target_labels(table: Table) -> list[str]:
    tgt = table.column(table.target)
    return [_canonical_cell(tgt.dtype, tgt.cell(i)) if tgt.validity[i] else "" for i in range(len(tgt))]


def _allocate_valid_counts(counts: list[int], fraction: float) -> list[int]:
    """Largest-remainder apportionment: the valid total is round(fraction * n)
    and each class stays within one row of its exact proportional share."""
    total = int(round(fraction * sum(counts)))
    quotas = [fraction * c for c in counts]
    alloc = [min(int(np.floor(q)), c) for q, c in zip(quotas, counts)]
    order = sorted(
        range(len(counts)), key=lambda i: quotas[i] - alloc[i], reverse=True
    )
    for i in order:
        if sum(alloc) >= total:
            break
        if alloc[i] < counts[i]:
            alloc[i] += 1
    return alloc


def _one_split(rng: np.random.Generator, groups: list[np.ndarray], fraction: float):
    ks = _allocate_valid_counts([len(g) for g in groups], fraction)
    valid_parts = []
    train_parts = []
    for g, k in zip(groups, ks):
        g = g.copy()
        rng.shuffle(g)
        valid_parts.append(g[:k])
        train_parts.append(g[k:])
    valid = np.concatenate(valid_parts)
    train = np.concatenate(train_parts)
    # Both sides must be non-empty; steal one row from the larger side if not.
    if len(valid) == 0:
        valid, train = train[:1], train[1:]
    elif len(train) == 0:
        train, valid = valid[:1], valid[1:]
    return np.sort(train), np.sort(valid)


def make_splits(table: Table, plan: SplitPlan) -> SplitResult:
    """Deterministic train/valid partitions of the row indices.

    Stratified splits keep per-class proportions within one row per class.
    Identical (seed, n_splits, row_count, labels) always produce identical
    index lists; split i draws from a generator seeded by (seed, i).
    """
    n = table.row_count
    if n < 2:
        raise TabularError("need at least 2 rows to split")
    stratified = plan.stratified
    warning = None
    if stratified:
        labels = np.array(_target_labels(table))
        classes, counts = np.unique(labels, return_counts=True)
        if counts.min() < plan.n_splits:
            stratified = False
            warning = (
                f"class {classes[int(counts.argmin())]!r} has {int(counts.min())} rows, "
                f"fewer than n_splits={plan.n_splits}; downgraded to unstratified"
            )
        else:
            groups = [np.flatnonzero(labels == c) for c in classes]
    if not stratified:
        groups = [np.arange(n)]
    splits = tuple(
        _one_split(np.random.default_rng([plan.seed, i]), groups, plan.valid_fraction)
        for i in range(plan.n_splits)
    )
    return SplitResult(splits, stratified, warning)


def encode_categories(table: Table, order: dict[str, list[str]]) -> Table:
    """Replace the named Category columns with Number code columns.

    Codes follow the given label order (0, 1, 2, ...), mirroring pipelines
    that hand categoricals to classifiers as integers. Labels outside the
    order become missing.
    """
    columns = []
    for col in table.columns:
        if col.name not in order:
            columns.append(col)
            continue
        if col.dtype is not Dtype.CATEGORY:
            raise TabularError(f"column {col.name!r} is not Category")
        code = {label: float(i) for i, label in enumerate(order[col.name])}
        cells = [
            code.get(col.cell(i)) if col.validity[i] else None
            for i in range(len(col))
        ]
        columns.append(make_column(col.name, Dtype.NUMBER, cells))
    return Table(tuple(columns), table.target)


def subsample(table: Table, fraction: float, rng_seed: int) -> Table:
    """Random row subsample without replacement, at least one row."""
    if not 0.0 < fraction <= 1.0:
        raise TabularError("fraction must be in (0, 1]")
    rng = np.random.default_rng(rng_seed)
    k = max(1, int(round(fraction * table.row_count)))
    idx = np.sort(rng.choice(table.row_count, size=k, replace=False))
    return table.take(idx)


# ---------------------------------------------------------------------------
# Bundled tic-tac-toe endgame fixture
# ---------------------------------------------------------------------------

_TTT_LINES = ((0, 1, 2), (3, 4, 5), (6, 7, 8), (0, 3, 6), (1, 4, 7), (2, 5, 8), (0, 4, 8), (2, 4, 6))
TTT_SQUARES = (
    "top-left-square",
    "top-middle-square",
    "top-right-square",
    "middle-left-square",
    "middle-middle-square",
    "middle-right-square",
    "bottom-left-square",
    "bottom-middle-square",
    "bottom-right-square",
)


def _ttt_winner(board: list[str]) -> str | None:
    for i, j, k in _TTT_LINES:
        if board[i] != "b" and board[i] == board[j] == board[k]:
            return board[i]
    return None


def gen_tictactoe() -> Table:
    """All board configurations at the end of tic-tac-toe games, x moving first.

    Nine Category squares valued {x, o, b} plus the binary target "Class"
    (positive = win for x). Rows are produced in lexicographic board order.
    """
    terminal: set[tuple[str, ...]] = set()
    seen: set[tuple[str, ...]] = set()  # positions expanded once; player is
    # implied by the mark counts, so the board alone identifies the state

    def play(board: list[str], player: str) -> None:
        key = tuple(board)
        if key in seen:
            return
        seen.add(key)
        if _ttt_winner(board) is not None or "b" not in board:
            terminal.add(key)
            return
        for i in range(9):
            if board[i] == "b":
                board[i] = player
                play(board, "o" if player == "x" else "x")
                board[i] = "b"

    play(["b"] * 9, "x")
    boards = sorted(terminal)
    columns = [
        make_column(name, Dtype.CATEGORY, [b[i] for b in boards])
        for i, name in enumerate(TTT_SQUARES)
    ]
    labels = ["positive" if _ttt_winner(list(b)) == "x" else "negative" for b in boards]
    columns.append(make_column("Class", Dtype.CATEGORY, labels))
    return Table(tuple(columns), "Class")
