"""The closed function whitelist.

This is the complete, enumerable set of callables the language exposes. The
validator rejects any identifier outside it, and the prompt builder renders
the doc lines so the code generator knows exactly what is available.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class FunctionInfo:
    name: str
    arity: int
    signature: str
    doc: str


WHITELIST: dict[str, FunctionInfo] = {
    f.name: f
    for f in (
        FunctionInfo(
            "if_else",
            3,
            "if_else(cond, a, b)",
            "a where cond is true, b where it is false; a and b must share one type",
        ),
        FunctionInfo(
            "bin",
            3,
            'bin(x, [e0, ..., ek], ["l1", ..., "lk"])',
            "label li for x in the half-open interval (e(i-1), ei]; outside the edges becomes missing",
        ),
        FunctionInfo(
            "str_split",
            3,
            "str_split(text, sep, index)",
            "piece at index (negative counts from the end) after splitting text by sep",
        ),
        FunctionInfo(
            "str_char",
            2,
            "str_char(text, index)",
            "single character at index (negative counts from the end)",
        ),
        FunctionInfo(
            "str_extract_int",
            1,
            "str_extract_int(text)",
            "first run of digits as a number; missing when there is none",
        ),
        FunctionInfo(
            "str_endswith",
            2,
            "str_endswith(text, suffix)",
            "true where text ends with suffix",
        ),
        FunctionInfo(
            "str_contains",
            2,
            "str_contains(text, needle)",
            "true where text contains needle",
        ),
        FunctionInfo(
            "fill_missing",
            2,
            "fill_missing(x, literal)",
            "x with missing cells replaced by the literal value",
        ),
        FunctionInfo(
            "is_missing",
            1,
            "is_missing(x)",
            "true where x is missing",
        ),
        FunctionInfo(
            "as_number",
            1,
            "as_number(x)",
            "numeric value of a boolean, category, or text cell; missing when unparseable",
        ),
        FunctionInfo(
            "as_int",
            1,
            "as_int(x)",
            "number truncated toward zero; fails if any input cell is missing",
        ),
        FunctionInfo(
            "as_category",
            1,
            "as_category(x)",
            "categorical copy of any column",
        ),
        FunctionInfo("abs", 1, "abs(x)", "absolute value"),
        FunctionInfo("log", 1, "log(x)", "natural logarithm; missing where x <= 0"),
        FunctionInfo("min2", 2, "min2(a, b)", "smaller of two numbers"),
        FunctionInfo("max2", 2, "max2(a, b)", "larger of two numbers"),
    )
}


def whitelist_doc_lines() -> list[str]:
    return [f"- {f.signature}: {f.doc}" for f in WHITELIST.values()]
