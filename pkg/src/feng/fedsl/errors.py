"""Error type shared by the feature-language front end and interpreters.

Messages are templated and stable: they are fed back verbatim into the next
LLM prompt, so identical inputs must produce identical text.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class ErrorKind(Enum):
    PARSE = "ParseError"
    UNKNOWN_COLUMN = "UnknownColumn"
    TYPE = "TypeError"
    ARITY = "ArityError"
    RUNTIME = "RuntimeError"
    DUPLICATE_FEATURE = "DuplicateFeature"


# Both interpreters raise this exact text; the error-recovery loop keys on it.
MISSING_TO_INT_MESSAGE = "cannot convert missing value to integer"


@dataclass
class ExecError(Exception):
    kind: ErrorKind
    message: str
    line: int | None = None
    column: int | None = None

    def render(self) -> str:
        """Canonical single-line rendering used in prompts and session logs."""
        if self.line is not None:
            return f"{self.kind.value} at line {self.line}, column {self.column}: {self.message}"
        return f"{self.kind.value}: {self.message}"

    def __str__(self) -> str:
        return self.render()
