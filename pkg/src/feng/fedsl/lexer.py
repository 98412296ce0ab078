"""Tokenizer for the feature-engineering language.

Comments run from `#` to end of line. Strings are double-quoted, single-line,
with \\\" \\\\ \\n \\t escapes. Numbers are unsigned decimals with optional
fraction and exponent; negative values come from unary minus.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ErrorKind, ExecError

PUNCT = {
    "{": "LBRACE",
    "}": "RBRACE",
    "(": "LPAREN",
    ")": "RPAREN",
    "[": "LBRACKET",
    "]": "RBRACKET",
    ":": "COLON",
    ",": "COMMA",
}

OPERATORS = ("==", "!=", "<=", ">=", "<", ">", "+", "-", "*", "/")

KEYWORDS = {
    "feature",
    "drop",
    "usefulness",
    "expr",
    "reason",
    "true",
    "false",
    "and",
    "or",
    "not",
    "col",
}


@dataclass(frozen=True)
class Token:
    kind: str  # STRING | NUMBER | IDENT | OP | punct kind | EOF
    text: str
    value: object
    line: int
    column: int


_ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "t": "\t"}


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(source)

    def error(message: str, l: int, c: int) -> ExecError:
        return ExecError(ErrorKind.PARSE, message, l, c)

    while i < n:
        ch = source[i]
        if ch == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if ch in " \t\r":
            i, col = i + 1, col + 1
            continue
        if ch == "#":
            while i < n and source[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if ch == '"':
            i, col = i + 1, col + 1
            parts: list[str] = []
            while True:
                if i >= n or source[i] == "\n":
                    raise error("unterminated string literal", start_line, start_col)
                c = source[i]
                if c == '"':
                    i, col = i + 1, col + 1
                    break
                if c == "\\":
                    if i + 1 >= n or source[i + 1] not in _ESCAPES:
                        raise error(
                            f"unknown escape sequence '\\{source[i + 1] if i + 1 < n else ''}'",
                            line,
                            col,
                        )
                    parts.append(_ESCAPES[source[i + 1]])
                    i, col = i + 2, col + 2
                    continue
                parts.append(c)
                i, col = i + 1, col + 1
            text = "".join(parts)
            tokens.append(Token("STRING", text, text, start_line, start_col))
            continue
        if ch.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            if j < n and source[j] == ".":
                j += 1
                if j >= n or not source[j].isdigit():
                    raise error("malformed number literal", start_line, start_col)
                while j < n and source[j].isdigit():
                    j += 1
            if j < n and source[j] in "eE":
                k = j + 1
                if k < n and source[k] in "+-":
                    k += 1
                if k >= n or not source[k].isdigit():
                    raise error("malformed number literal", start_line, start_col)
                j = k
                while j < n and source[j].isdigit():
                    j += 1
            text = source[i:j]
            tokens.append(Token("NUMBER", text, float(text), start_line, start_col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            text = source[i:j]
            tokens.append(Token("IDENT", text, text, start_line, start_col))
            col += j - i
            i = j
            continue
        two = source[i : i + 2]
        if two in OPERATORS:
            tokens.append(Token("OP", two, two, start_line, start_col))
            i, col = i + 2, col + 2
            continue
        if ch in OPERATORS:
            tokens.append(Token("OP", ch, ch, start_line, start_col))
            i, col = i + 1, col + 1
            continue
        if ch in PUNCT:
            tokens.append(Token(PUNCT[ch], ch, ch, start_line, start_col))
            i, col = i + 1, col + 1
            continue
        raise error(f"unexpected character {ch!r}", start_line, start_col)
    tokens.append(Token("EOF", "", None, line, col))
    return tokens
