"""The safe feature-engineering language: parser, validator, interpreters, printer."""

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
    Statement,
    StringLit,
    Unary,
)
from .errors import MISSING_TO_INT_MESSAGE, ErrorKind, ExecError
from .functions import WHITELIST, whitelist_doc_lines
from .interpreter import evaluate
from .parser import parse
from .printer import pretty_print
from .reference import reference_evaluate
from .validator import validate

__all__ = [
    "Binary",
    "BoolLit",
    "Call",
    "ColumnRef",
    "DropColumn",
    "Expr",
    "FeatureDef",
    "FeatureScript",
    "ListLit",
    "NumberLit",
    "Statement",
    "StringLit",
    "Unary",
    "ErrorKind",
    "ExecError",
    "MISSING_TO_INT_MESSAGE",
    "WHITELIST",
    "whitelist_doc_lines",
    "parse",
    "validate",
    "evaluate",
    "reference_evaluate",
    "pretty_print",
]
