"""Static validation: column resolution, closed-whitelist calls, and typing.

Every expression node is assigned a result dtype. Features defined earlier in
a script are visible to later statements; dropped columns are not.
"""

from __future__ import annotations

from ..tabular import Dtype
from .ast import (
    Binary,
    BoolLit,
    Call,
    ColumnRef,
    DropColumn,
    Expr,
    FeatureDef,
    FeatureScript,
    ListLit,
    NumberLit,
    StringLit,
    Unary,
)
from .errors import ErrorKind, ExecError
from .functions import WHITELIST

_ARITHMETIC = ("+", "-", "*", "/")
_ORDERING = ("<", "<=", ">", ">=")
_EQUALITY = ("==", "!=")


def _err(kind: ErrorKind, message: str, node) -> ExecError:
    return ExecError(kind, message, node.span[0] or None, node.span[1] or None)


def literal_value(node: Expr):
    """Constant value of a literal node (unary minus folded); None if not a literal."""
    if isinstance(node, NumberLit):
        return node.value
    if isinstance(node, StringLit):
        return node.value
    if isinstance(node, BoolLit):
        return node.value
    if isinstance(node, Unary) and node.op == "-" and isinstance(node.operand, NumberLit):
        return -node.operand.value
    return None


def _literal_dtype(value) -> Dtype:
    if isinstance(value, bool):
        return Dtype.BOOLEAN
    if isinstance(value, float):
        return Dtype.NUMBER
    return Dtype.TEXT


class _Validator:
    def __init__(self, env: dict[str, Dtype]):
        self.env = env

    def type_expr(self, node: Expr) -> Dtype:
        dtype = self._infer(node)
        node.dtype = dtype
        return dtype

    def _infer(self, node: Expr) -> Dtype:
        if isinstance(node, ColumnRef):
            if node.name not in self.env:
                raise _err(
                    ErrorKind.UNKNOWN_COLUMN, f'unknown column "{node.name}"', node
                )
            return self.env[node.name]
        if isinstance(node, NumberLit):
            return Dtype.NUMBER
        if isinstance(node, StringLit):
            return Dtype.TEXT
        if isinstance(node, BoolLit):
            return Dtype.BOOLEAN
        if isinstance(node, ListLit):
            raise _err(
                ErrorKind.TYPE,
                "list literal is only allowed as bin() edges or labels",
                node,
            )
        if isinstance(node, Unary):
            t = self.type_expr(node.operand)
            if node.op == "-":
                if t is not Dtype.NUMBER:
                    raise _err(
                        ErrorKind.TYPE,
                        f"operator '-' expects a Number operand, got {t.value}",
                        node,
                    )
                return Dtype.NUMBER
            if t is not Dtype.BOOLEAN:
                raise _err(
                    ErrorKind.TYPE,
                    f"operator 'not' expects a Boolean operand, got {t.value}",
                    node,
                )
            return Dtype.BOOLEAN
        if isinstance(node, Binary):
            return self._infer_binary(node)
        if isinstance(node, Call):
            return self._infer_call(node)
        raise AssertionError(f"unhandled node {node!r}")

    def _infer_binary(self, node: Binary) -> Dtype:
        lt = self.type_expr(node.left)
        rt = self.type_expr(node.right)
        op = node.op
        if op in _ARITHMETIC:
            if lt is Dtype.NUMBER and rt is Dtype.NUMBER:
                return Dtype.NUMBER
            raise _err(
                ErrorKind.TYPE,
                f"operator '{op}' expects Number operands, got {lt.value} and {rt.value}",
                node,
            )
        if op in _ORDERING:
            if lt is Dtype.NUMBER and rt is Dtype.NUMBER:
                return Dtype.BOOLEAN
            raise _err(
                ErrorKind.TYPE,
                f"operator '{op}' expects Number operands, got {lt.value} and {rt.value}",
                node,
            )
        if op in _EQUALITY:
            comparable = lt == rt or {lt, rt} == {Dtype.CATEGORY, Dtype.TEXT}
            if comparable:
                return Dtype.BOOLEAN
            raise _err(
                ErrorKind.TYPE,
                f"cannot compare {lt.value} and {rt.value} with '{op}'",
                node,
            )
        if op in ("and", "or"):
            if lt is Dtype.BOOLEAN and rt is Dtype.BOOLEAN:
                return Dtype.BOOLEAN
            raise _err(
                ErrorKind.TYPE,
                f"operator '{op}' expects Boolean operands, got {lt.value} and {rt.value}",
                node,
            )
        raise AssertionError(f"unhandled operator {op!r}")

    def _infer_call(self, node: Call) -> Dtype:
        info = WHITELIST.get(node.name)
        if info is None:
            raise _err(ErrorKind.TYPE, f'unknown function "{node.name}"', node)
        if len(node.args) != info.arity:
            raise _err(
                ErrorKind.ARITY,
                f"{node.name} expects {info.arity} arguments, got {len(node.args)}",
                node,
            )
        name = node.name
        if name == "bin":
            return self._infer_bin(node)
        if name == "fill_missing":
            return self._infer_fill_missing(node)
        if name == "if_else":
            cond = self.type_expr(node.args[0])
            if cond is not Dtype.BOOLEAN:
                raise _err(
                    ErrorKind.TYPE,
                    f"if_else condition must be Boolean, got {cond.value}",
                    node,
                )
            ta = self.type_expr(node.args[1])
            tb = self.type_expr(node.args[2])
            if ta != tb:
                raise _err(
                    ErrorKind.TYPE,
                    f"if_else branches must share a type, got {ta.value} and {tb.value}",
                    node,
                )
            return ta
        if name in ("is_missing", "as_category"):
            self.type_expr(node.args[0])
            return Dtype.BOOLEAN if name == "is_missing" else Dtype.CATEGORY
        if name == "as_number":
            t = self.type_expr(node.args[0])
            if t is Dtype.NUMBER:
                raise _err(
                    ErrorKind.TYPE,
                    "as_number expects Text, Boolean, or Category, got Number",
                    node,
                )
            return Dtype.NUMBER
        if name in ("as_int", "abs", "log"):
            self._expect_arg(node, 0, Dtype.NUMBER)
            return Dtype.NUMBER
        if name in ("min2", "max2"):
            self._expect_arg(node, 0, Dtype.NUMBER)
            self._expect_arg(node, 1, Dtype.NUMBER)
            return Dtype.NUMBER
        if name == "str_extract_int":
            self._expect_arg(node, 0, Dtype.TEXT)
            return Dtype.NUMBER
        if name in ("str_endswith", "str_contains"):
            self._expect_arg(node, 0, Dtype.TEXT)
            self._expect_arg(node, 1, Dtype.TEXT)
            return Dtype.BOOLEAN
        if name == "str_char":
            self._expect_arg(node, 0, Dtype.TEXT)
            self._expect_arg(node, 1, Dtype.NUMBER)
            return Dtype.TEXT
        if name == "str_split":
            self._expect_arg(node, 0, Dtype.TEXT)
            self._expect_arg(node, 1, Dtype.TEXT)
            self._expect_arg(node, 2, Dtype.NUMBER)
            return Dtype.TEXT
        raise AssertionError(f"unhandled whitelist function {name!r}")

    def _expect_arg(self, node: Call, index: int, expected: Dtype) -> None:
        t = self.type_expr(node.args[index])
        if t is not expected:
            raise _err(
                ErrorKind.TYPE,
                f"{node.name} argument {index + 1} must be {expected.value}, got {t.value}",
                node.args[index],
            )

    def _infer_bin(self, node: Call) -> Dtype:
        self._expect_arg(node, 0, Dtype.NUMBER)
        edges_node, labels_node = node.args[1], node.args[2]
        if not isinstance(edges_node, ListLit) or not isinstance(labels_node, ListLit):
            raise _err(
                ErrorKind.TYPE,
                "bin edges and labels must be bracketed literal lists",
                node,
            )
        edges = [literal_value(e) for e in edges_node.items]
        if len(edges) < 2 or any(not isinstance(e, float) for e in edges):
            raise _err(
                ErrorKind.TYPE, "bin edges must be at least two number literals", edges_node
            )
        if any(b <= a for a, b in zip(edges, edges[1:])):
            raise _err(ErrorKind.TYPE, "bin edges must be strictly increasing", edges_node)
        labels = [literal_value(l) for l in labels_node.items]
        if any(not isinstance(l, str) for l in labels):
            raise _err(ErrorKind.TYPE, "bin labels must be text literals", labels_node)
        if len(labels) != len(edges) - 1:
            raise _err(
                ErrorKind.ARITY,
                f"bin needs one label per interval: {len(edges) - 1} intervals, {len(labels)} labels",
                labels_node,
            )
        edges_node.dtype = None
        labels_node.dtype = None
        return Dtype.CATEGORY

    def _infer_fill_missing(self, node: Call) -> Dtype:
        t = self.type_expr(node.args[0])
        fill = node.args[1]
        value = literal_value(fill)
        if value is None:
            raise _err(ErrorKind.TYPE, "fill_missing fill value must be a literal", fill)
        ft = _literal_dtype(value)
        fill.dtype = ft
        ok = ft == t or (t is Dtype.CATEGORY and ft is Dtype.TEXT)
        if not ok:
            raise _err(
                ErrorKind.TYPE,
                f"fill_missing fill value must match the column type {t.value}, got {ft.value}",
                fill,
            )
        return t


def validate(
    script: FeatureScript,
    schema: dict[str, Dtype],
    target: str | None = None,
) -> FeatureScript:
    """Type the script against a schema, in statement order. Returns the script
    with dtype annotations; raises ExecError on the first violation."""
    env = dict(schema)
    for stmt in script.statements:
        if isinstance(stmt, FeatureDef):
            if stmt.name in env:
                raise ExecError(
                    ErrorKind.DUPLICATE_FEATURE,
                    f'a column named "{stmt.name}" already exists',
                    stmt.span[0] or None,
                    stmt.span[1] or None,
                )
            _Validator(env).type_expr(stmt.expr)
            env[stmt.name] = stmt.expr.dtype
        else:
            assert isinstance(stmt, DropColumn)
            if stmt.name not in env:
                raise ExecError(
                    ErrorKind.UNKNOWN_COLUMN,
                    f'unknown column "{stmt.name}"',
                    stmt.span[0] or None,
                    stmt.span[1] or None,
                )
            if target is not None and stmt.name == target:
                raise ExecError(
                    ErrorKind.TYPE,
                    f'cannot drop the target column "{stmt.name}"',
                    stmt.span[0] or None,
                    stmt.span[1] or None,
                )
            del env[stmt.name]
    return script
