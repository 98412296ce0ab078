"""Column-at-a-time evaluation of validated scripts.

Every expression is row-independent, so each node evaluates to one value
array plus a validity mask over all rows at once. Missing cells propagate
through every operation except fill_missing, is_missing, and the selected
branch rule of if_else. Non-finite numeric results become missing. The only
runtime failure is as_int over a missing cell; it aborts the whole script.
"""

from __future__ import annotations

import re
from typing import NamedTuple

import numpy as np

from ..tabular import Column, Dtype, Table
from .ast import (
    Binary,
    BoolLit,
    Call,
    ColumnRef,
    DropColumn,
    Expr,
    FeatureDef,
    FeatureScript,
    NumberLit,
    StringLit,
    Unary,
)
from .errors import MISSING_TO_INT_MESSAGE, ErrorKind, ExecError
from .validator import literal_value

_DIGITS = re.compile(r"\d+")


class VCol(NamedTuple):
    dtype: Dtype
    values: np.ndarray
    validity: np.ndarray


def _number(values: np.ndarray, validity: np.ndarray) -> VCol:
    validity = validity & np.isfinite(values)
    return VCol(Dtype.NUMBER, np.where(validity, values, np.nan), validity)


def _const(dtype: Dtype, value, n: int) -> VCol:
    if dtype is Dtype.NUMBER:
        return _number(np.full(n, value, dtype=np.float64), np.ones(n, dtype=bool))
    if dtype is Dtype.BOOLEAN:
        return VCol(dtype, np.full(n, value, dtype=bool), np.ones(n, dtype=bool))
    return VCol(dtype, np.full(n, value, dtype=object), np.ones(n, dtype=bool))


def _text_kernel(arg: VCol, fn, out_dtype: Dtype, extra: tuple[VCol, ...] = ()) -> VCol:
    """Apply a per-cell function over valid rows; fn returning None means missing."""
    n = len(arg.values)
    valid = arg.validity.copy()
    for e in extra:
        valid &= e.validity
    if out_dtype is Dtype.NUMBER:
        out = np.full(n, np.nan, dtype=np.float64)
    elif out_dtype is Dtype.BOOLEAN:
        out = np.zeros(n, dtype=bool)
    else:
        out = np.full(n, "", dtype=object)
    for i in np.flatnonzero(valid):
        r = fn(arg.values[i], *(e.values[i] for e in extra))
        if r is None:
            valid[i] = False
        else:
            out[i] = r
    if out_dtype is Dtype.NUMBER:
        return _number(out, valid)
    return VCol(out_dtype, out, valid)


def column_to_vcol(col: Column) -> VCol:
    return VCol(col.dtype, col.values, col.validity)


def vcol_to_column(name: str, v: VCol) -> Column:
    values, validity = v.values, v.validity
    categories: tuple[str, ...] = ()
    if v.dtype is Dtype.NUMBER:
        validity = validity & np.isfinite(values)
        values = np.where(validity, values, np.nan)
    elif v.dtype is Dtype.CATEGORY:
        categories = tuple(sorted({str(x) for x in values[validity]}))
    return Column(name, v.dtype, values.copy(), validity.copy(), categories)


class _Interpreter:
    def __init__(self, table: Table):
        self.n = table.row_count
        self.columns = {c.name: column_to_vcol(c) for c in table.columns}

    def eval(self, node: Expr) -> VCol:
        if isinstance(node, ColumnRef):
            return self.columns[node.name]
        if isinstance(node, NumberLit):
            return _const(Dtype.NUMBER, node.value, self.n)
        if isinstance(node, StringLit):
            return _const(Dtype.TEXT, node.value, self.n)
        if isinstance(node, BoolLit):
            return _const(Dtype.BOOLEAN, node.value, self.n)
        if isinstance(node, Unary):
            v = self.eval(node.operand)
            if node.op == "-":
                return _number(-v.values, v.validity)
            return VCol(Dtype.BOOLEAN, ~v.values, v.validity)
        if isinstance(node, Binary):
            return self._binary(node)
        if isinstance(node, Call):
            return self._call(node)
        raise AssertionError(f"unhandled node {node!r}")

    def _binary(self, node: Binary) -> VCol:
        l = self.eval(node.left)
        r = self.eval(node.right)
        op = node.op
        both = l.validity & r.validity
        if op in ("+", "-", "*", "/"):
            with np.errstate(all="ignore"):
                if op == "+":
                    v = l.values + r.values
                elif op == "-":
                    v = l.values - r.values
                elif op == "*":
                    v = l.values * r.values
                else:
                    v = l.values / r.values
            return _number(v, both)
        if op in ("<", "<=", ">", ">="):
            with np.errstate(invalid="ignore"):
                if op == "<":
                    v = l.values < r.values
                elif op == "<=":
                    v = l.values <= r.values
                elif op == ">":
                    v = l.values > r.values
                else:
                    v = l.values >= r.values
            return VCol(Dtype.BOOLEAN, v & both, both)
        if op in ("==", "!="):
            eq = l.values == r.values
            if not isinstance(eq, np.ndarray):  # object-array fallback
                eq = np.array([a == b for a, b in zip(l.values, r.values)], dtype=bool)
            v = eq if op == "==" else ~eq
            return VCol(Dtype.BOOLEAN, v & both, both)
        if op == "and":
            return VCol(Dtype.BOOLEAN, l.values & r.values & both, both)
        if op == "or":
            return VCol(Dtype.BOOLEAN, (l.values | r.values) & both, both)
        raise AssertionError(f"unhandled operator {op!r}")

    def _call(self, node: Call) -> VCol:
        name = node.name
        if name == "bin":
            return self._bin(node)
        if name == "fill_missing":
            base = self.eval(node.args[0])
            fill = literal_value(node.args[1])
            if base.dtype is Dtype.NUMBER:
                values = np.where(base.validity, base.values, float(fill))
            elif base.dtype is Dtype.BOOLEAN:
                values = np.where(base.validity, base.values, bool(fill)).astype(bool)
            else:
                values = np.where(base.validity, base.values, str(fill))
            return VCol(base.dtype, values, np.ones(self.n, dtype=bool))
        if name == "if_else":
            cond = self.eval(node.args[0])
            a = self.eval(node.args[1])
            b = self.eval(node.args[2])
            sel = cond.values & cond.validity
            values = np.where(sel, a.values, b.values)
            if a.dtype is Dtype.BOOLEAN:
                values = values.astype(bool)
            validity = cond.validity & np.where(sel, a.validity, b.validity)
            if a.dtype is Dtype.NUMBER:
                return _number(values, validity)
            return VCol(a.dtype, values, validity)
        args = [self.eval(a) for a in node.args]
        if name == "is_missing":
            return VCol(Dtype.BOOLEAN, ~args[0].validity, np.ones(self.n, dtype=bool))
        if name == "as_number":
            return self._as_number(args[0])
        if name == "as_int":
            v = args[0]
            if not v.validity.all():
                raise ExecError(
                    ErrorKind.RUNTIME,
                    MISSING_TO_INT_MESSAGE,
                    node.span[0] or None,
                    node.span[1] or None,
                )
            return _number(np.trunc(v.values), v.validity)
        if name == "as_category":
            return self._as_category(args[0])
        if name == "abs":
            return _number(np.abs(args[0].values), args[0].validity)
        if name == "log":
            v = args[0]
            with np.errstate(all="ignore"):
                out = np.log(v.values)
            return _number(out, v.validity & (v.values > 0))
        if name == "min2":
            return _number(
                np.minimum(args[0].values, args[1].values),
                args[0].validity & args[1].validity,
            )
        if name == "max2":
            return _number(
                np.maximum(args[0].values, args[1].values),
                args[0].validity & args[1].validity,
            )
        if name == "str_extract_int":
            def extract(s):
                m = _DIGITS.search(s)
                return float(m.group()) if m else None

            return _text_kernel(args[0], extract, Dtype.NUMBER)
        if name == "str_char":
            def char_at(s, idx):
                i = int(idx)
                try:
                    return s[i]
                except IndexError:
                    return None

            return _text_kernel(args[0], char_at, Dtype.TEXT, (args[1],))
        if name == "str_split":
            def split_at(s, sep, idx):
                if sep == "":
                    return None
                parts = s.split(sep)
                i = int(idx)
                try:
                    return parts[i]
                except IndexError:
                    return None

            return _text_kernel(args[0], split_at, Dtype.TEXT, (args[1], args[2]))
        if name == "str_endswith":
            return _text_kernel(
                args[0], lambda s, suf: s.endswith(suf), Dtype.BOOLEAN, (args[1],)
            )
        if name == "str_contains":
            return _text_kernel(
                args[0], lambda s, sub: sub in s, Dtype.BOOLEAN, (args[1],)
            )
        raise AssertionError(f"unhandled whitelist function {name!r}")

    def _bin(self, node: Call) -> VCol:
        x = self.eval(node.args[0])
        edges = np.array([literal_value(e) for e in node.args[1].items], dtype=np.float64)
        labels = np.array([literal_value(l) for l in node.args[2].items], dtype=object)
        with np.errstate(invalid="ignore"):
            inside = (x.values > edges[0]) & (x.values <= edges[-1])
        validity = x.validity & inside
        idx = np.searchsorted(edges, np.where(validity, x.values, edges[0]), side="left")
        idx = np.clip(idx, 1, len(edges) - 1)
        values = labels[idx - 1]
        values = np.where(validity, values, "")
        return VCol(Dtype.CATEGORY, values, validity)

    def _as_number(self, v: VCol) -> VCol:
        if v.dtype is Dtype.BOOLEAN:
            return _number(v.values.astype(np.float64), v.validity.copy())

        def parse(s):
            try:
                f = float(s)
            except ValueError:
                return None
            return f

        return _text_kernel(v, parse, Dtype.NUMBER)

    def _as_category(self, v: VCol) -> VCol:
        if v.dtype is Dtype.NUMBER:
            values = np.array(
                [repr(float(x)) if ok else "" for x, ok in zip(v.values, v.validity)],
                dtype=object,
            )
        elif v.dtype is Dtype.BOOLEAN:
            values = np.where(v.values, "true", "false").astype(object)
        else:
            values = v.values.astype(object)
        return VCol(Dtype.CATEGORY, values, v.validity.copy())


def evaluate(script: FeatureScript, table: Table) -> Table:
    """Run a validated script, returning a new Table; the input is untouched."""
    work = table
    for stmt in script.statements:
        if isinstance(stmt, FeatureDef):
            interp = _Interpreter(work)
            vcol = interp.eval(stmt.expr)
            work = work.with_column(vcol_to_column(stmt.name, vcol))
        else:
            assert isinstance(stmt, DropColumn)
            work = work.without_column(stmt.name)
    return work
