"""Canonical formatter. parse(pretty_print(s)) is structurally identical to s;
comments from the original source are not preserved."""

from __future__ import annotations

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

# Binding strength, loosest to tightest; primaries never need parentheses.
_LEVELS = {"or": 1, "and": 2, "not": 3, "cmp": 4, "add": 5, "mul": 6, "neg": 7}
_OP_LEVEL = {
    "or": _LEVELS["or"],
    "and": _LEVELS["and"],
    "==": _LEVELS["cmp"],
    "!=": _LEVELS["cmp"],
    "<": _LEVELS["cmp"],
    "<=": _LEVELS["cmp"],
    ">": _LEVELS["cmp"],
    ">=": _LEVELS["cmp"],
    "+": _LEVELS["add"],
    "-": _LEVELS["add"],
    "*": _LEVELS["mul"],
    "/": _LEVELS["mul"],
}
_PRIMARY = 8


def quote(text: str) -> str:
    escaped = (
        text.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\t", "\\t")
    )
    return f'"{escaped}"'


def _format(node: Expr, context: int) -> str:
    if isinstance(node, NumberLit):
        text, level = repr(node.value), _PRIMARY
    elif isinstance(node, StringLit):
        text, level = quote(node.value), _PRIMARY
    elif isinstance(node, BoolLit):
        text, level = ("true" if node.value else "false"), _PRIMARY
    elif isinstance(node, ColumnRef):
        text, level = f"col({quote(node.name)})", _PRIMARY
    elif isinstance(node, ListLit):
        text = "[" + ", ".join(_format(i, 0) for i in node.items) + "]"
        level = _PRIMARY
    elif isinstance(node, Call):
        text = f"{node.name}(" + ", ".join(_format(a, 0) for a in node.args) + ")"
        level = _PRIMARY
    elif isinstance(node, Unary):
        if node.op == "-":
            level = _LEVELS["neg"]
            text = f"-{_format(node.operand, level)}"
        else:
            level = _LEVELS["not"]
            # `not` binds looser than comparisons; its operand needs at least
            # comparison strength to re-parse identically.
            text = f"not {_format(node.operand, _LEVELS['cmp'])}"
    elif isinstance(node, Binary):
        level = _OP_LEVEL[node.op]
        # Left associative: the right child must bind strictly tighter.
        # Comparisons do not chain, so their left child must as well.
        left = _format(node.left, level + (1 if level == _LEVELS["cmp"] else 0))
        right = _format(node.right, level + 1)
        text = f"{left} {node.op} {right}"
    else:
        raise AssertionError(f"unhandled node {node!r}")
    return f"({text})" if level < context else text


def pretty_print(script: FeatureScript) -> str:
    """Canonical text form; empty script renders as empty text."""
    parts = []
    for stmt in script.statements:
        if isinstance(stmt, FeatureDef):
            parts.append(
                f"feature {quote(stmt.name)} {{\n"
                f"  usefulness: {quote(stmt.usefulness)}\n"
                f"  expr: {_format(stmt.expr, 0)}\n"
                f"}}"
            )
        else:
            assert isinstance(stmt, DropColumn)
            line = f"drop {quote(stmt.name)}"
            if stmt.reason is not None:
                line += f" reason {quote(stmt.reason)}"
            parts.append(line)
    return "\n".join(parts) + ("\n" if parts else "")
