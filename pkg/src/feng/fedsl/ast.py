"""AST for the feature-engineering language.

Node equality is structural: source spans and inferred dtypes are excluded
from comparison so that parse(pretty_print(s)) == s holds.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..tabular import Dtype

Span = tuple[int, int]  # (line, column), 1-based

_NOSPAN: Span = (0, 0)


@dataclass
class Expr:
    span: Span = field(default=_NOSPAN, compare=False, kw_only=True)
    dtype: Dtype | None = field(default=None, compare=False, kw_only=True)


@dataclass
class ColumnRef(Expr):
    name: str = ""


@dataclass
class NumberLit(Expr):
    value: float = 0.0


@dataclass
class StringLit(Expr):
    value: str = ""


@dataclass
class BoolLit(Expr):
    value: bool = False


@dataclass
class ListLit(Expr):
    """Bracketed literal list; only legal as bin() edges/labels arguments."""

    items: tuple[Expr, ...] = ()


@dataclass
class Unary(Expr):
    op: str = ""  # "-" | "not"
    operand: Expr = None


@dataclass
class Binary(Expr):
    op: str = ""  # + - * / == != < <= > >= and or
    left: Expr = None
    right: Expr = None


@dataclass
class Call(Expr):
    name: str = ""
    args: tuple[Expr, ...] = ()


@dataclass
class FeatureDef:
    name: str
    usefulness: str
    expr: Expr
    span: Span = field(default=_NOSPAN, compare=False, kw_only=True)


@dataclass
class DropColumn:
    name: str
    reason: str | None = None
    span: Span = field(default=_NOSPAN, compare=False, kw_only=True)


Statement = FeatureDef | DropColumn


@dataclass
class FeatureScript:
    statements: tuple[Statement, ...]
    source_text: str = field(default="", compare=False)

    def feature_names(self) -> list[str]:
        return [s.name for s in self.statements if isinstance(s, FeatureDef)]

    def __len__(self) -> int:
        return len(self.statements)
