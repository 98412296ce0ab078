"""Naive row-by-row oracle with the same contract as the vectorized interpreter.

Independent implementation used to cross-check evaluate(): a scalar tree walk
per row over plain Python values (None = missing). Error parity is on
(kind, message); the reported source location may name a different as_int
call when several could fail, since this walk visits rows outermost.
"""

from __future__ import annotations

import math
import re

from ..tabular import Column, Dtype, Table, make_column
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

_DIGIT_RUN = re.compile(r"\d+")


def _finite_or_none(value: float) -> float | None:
    return value if math.isfinite(value) else None


def _walk(node: Expr, row: dict[str, object]):
    if isinstance(node, ColumnRef):
        return row[node.name]
    if isinstance(node, NumberLit):
        return node.value
    if isinstance(node, StringLit):
        return node.value
    if isinstance(node, BoolLit):
        return node.value
    if isinstance(node, Unary):
        v = _walk(node.operand, row)
        if v is None:
            return None
        return -v if node.op == "-" else (not v)
    if isinstance(node, Binary):
        a = _walk(node.left, row)
        b = _walk(node.right, row)
        if a is None or b is None:
            return None
        op = node.op
        if op == "+":
            return _finite_or_none(a + b)
        if op == "-":
            return _finite_or_none(a - b)
        if op == "*":
            return _finite_or_none(a * b)
        if op == "/":
            try:
                return _finite_or_none(a / b)
            except ZeroDivisionError:
                return None
        if op == "==":
            return a == b
        if op == "!=":
            return a != b
        if op == "<":
            return a < b
        if op == "<=":
            return a <= b
        if op == ">":
            return a > b
        if op == ">=":
            return a >= b
        if op == "and":
            return a and b
        return a or b
    assert isinstance(node, Call)
    return _call(node, row)


def _call(node: Call, row: dict[str, object]):
    name = node.name
    if name == "if_else":
        # Both branches evaluate unconditionally, mirroring the vectorized
        # interpreter: an as_int failure in the unselected branch still aborts.
        cond = _walk(node.args[0], row)
        a = _walk(node.args[1], row)
        b = _walk(node.args[2], row)
        if cond is None:
            return None
        return a if cond else b
    if name == "bin":
        x = _walk(node.args[0], row)
        edges = [literal_value(e) for e in node.args[1].items]
        labels = [literal_value(l) for l in node.args[2].items]
        if x is None or x <= edges[0] or x > edges[-1]:
            return None
        for i in range(1, len(edges)):
            if edges[i - 1] < x <= edges[i]:
                return labels[i - 1]
        raise AssertionError("unreachable: x inside the outer edges")
    if name == "fill_missing":
        v = _walk(node.args[0], row)
        return literal_value(node.args[1]) if v is None else v
    if name == "is_missing":
        return _walk(node.args[0], row) is None
    args = [_walk(a, row) for a in node.args]
    if name == "as_int":
        if args[0] is None:
            raise ExecError(
                ErrorKind.RUNTIME,
                MISSING_TO_INT_MESSAGE,
                node.span[0] or None,
                node.span[1] or None,
            )
        return float(math.trunc(args[0]))
    if any(a is None for a in args):
        return None
    if name == "as_number":
        v = args[0]
        if isinstance(v, bool):
            return 1.0 if v else 0.0
        try:
            return _finite_or_none(float(v))
        except ValueError:
            return None
    if name == "as_category":
        v = args[0]
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, float):
            return repr(v)
        return v
    if name == "abs":
        return abs(args[0])
    if name == "log":
        return math.log(args[0]) if args[0] > 0 else None
    if name == "min2":
        return min(args[0], args[1])
    if name == "max2":
        return max(args[0], args[1])
    if name == "str_extract_int":
        m = _DIGIT_RUN.search(args[0])
        return float(m.group()) if m else None
    if name == "str_char":
        try:
            return args[0][int(args[1])]
        except IndexError:
            return None
    if name == "str_split":
        if args[1] == "":
            return None
        parts = args[0].split(args[1])
        try:
            return parts[int(args[2])]
        except IndexError:
            return None
    if name == "str_endswith":
        return args[0].endswith(args[1])
    if name == "str_contains":
        return args[1] in args[0]
    raise AssertionError(f"unhandled whitelist function {name!r}")


def reference_evaluate(script: FeatureScript, table: Table) -> Table:
    """Same contract as interpreter.evaluate, computed one row at a time."""
    work = table
    for stmt in script.statements:
        if isinstance(stmt, DropColumn):
            work = work.without_column(stmt.name)
            continue
        assert isinstance(stmt, FeatureDef)
        cells = []
        columns = list(work.columns)
        for i in range(work.row_count):
            row = {c.name: c.cell(i) for c in columns}
            cells.append(_walk(stmt.expr, row))
        dtype = stmt.expr.dtype
        assert dtype is not None, "script must be validated before evaluation"
        work = work.with_column(make_column(stmt.name, dtype, cells))
    return work
