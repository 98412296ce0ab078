"""Bundled deterministic playbooks for offline reproduction runs.

These canned responses drive the scripted backend through the two showcase
scenarios: the tic-tac-toe win-count run and the error-recovery exchange over
a policy dataset with text-encoded age bounds.
"""

from __future__ import annotations

from pathlib import Path

from .tabular import TTT_SQUARES, Table, encode_categories

_TTT_LINES = ((0, 1, 2), (3, 4, 5), (6, 7, 8), (0, 3, 6), (1, 4, 7), (2, 5, 8), (0, 4, 8), (2, 4, 6))

# Board cells reach the classifier integer-encoded, as in the source run the
# playbook reproduces: blank 0, x 1, o 2. The win-count features test ==1/==2.
TTT_ENCODING = {square: ["b", "x", "o"] for square in TTT_SQUARES}


def encode_tictactoe(table: Table) -> Table:
    return encode_categories(table, TTT_ENCODING)


def _win_count_expr(code: int) -> str:
    terms = []
    for a, b, c in _TTT_LINES:
        terms.append(
            f'as_number(col("{TTT_SQUARES[a]}") == {code} '
            f'and col("{TTT_SQUARES[b]}") == {code} '
            f'and col("{TTT_SQUARES[c]}") == {code})'
        )
    return "\n      + ".join(terms)


def _win_count_block(mark: str, code: int) -> str:
    name = f"number-of-{mark}-wins"
    return (
        "```fedsl\n"
        f"# ('{name}', 'Number of ways {mark} can win on the board')\n"
        f"# Usefulness: Knowing the number of ways {mark} can win on the board can be "
        f"useful in predicting whether {mark} has won the game or not.\n"
        "# Input samples: 'top-left-square': [2, 2, 1], 'top-middle-square': [1, 2, 0], ...\n"
        f'feature "{name}" {{\n'
        f'  usefulness: "Knowing the number of ways {mark} can win on the board can be '
        f'useful in predicting whether {mark} has won the game or not."\n'
        f"  expr: {_win_count_expr(code)}\n"
        "}\n"
        "```end\n"
    )


def tictactoe_playbook() -> list[str]:
    """Win-count features, one codeblock per iteration: o-wins first, then
    x-wins. With the linear evaluator the x-win count alone already separates
    the target perfectly, so it must come second for both blocks to clear the
    strictly-positive acceptance rule (draw boards keep the o-win count
    imperfect, leaving headroom for the second block)."""
    return [_win_count_block("o", 2), _win_count_block("x", 1)]


TTT_SUBSAMPLE_SEED = 2  # 10% subsample that contains draw boards
TTT_DESCRIPTION = (
    "Tic-Tac-Toe Endgame database. This database encodes the complete set of "
    'possible board configurations at the end of tic-tac-toe games, where "x" '
    'is assumed to have played first. The target concept is "win for x" (i.e., '
    'true when "x" has one of 8 possible ways to create a "three-in-a-row").'
)


_AGE_DIFF_HEADER = (
    "# Feature: Age_difference\n"
    "# Usefulness: Age difference between upper and lower age can be useful in "
    "determining the likelihood of a person applying for a policy.\n"
    "# Input samples: 'Upper_Age': ['C33', 'C2', 'C3'], 'Lower_Age': ['Owned', 'Rented', 'Rented']\n"
)


def insurance_playbook() -> list[str]:
    """First a strict integer conversion that fails on missing values, then the
    corrected version that fills them; reproduces the error-recovery exchange."""
    failing = (
        "```fedsl\n"
        + _AGE_DIFF_HEADER
        + 'feature "Age_difference" {\n'
        '  usefulness: "Age difference between upper and lower age can be useful in '
        'determining the likelihood of a person applying for a policy."\n'
        '  expr: as_int(str_extract_int(col("Upper_Age")) - str_extract_int(col("Lower_Age")))\n'
        "}\n"
        "```end\n"
    )
    fixed = (
        "```fedsl\n"
        + _AGE_DIFF_HEADER
        + 'feature "Age_difference" {\n'
        '  usefulness: "Age difference between upper and lower age can be useful in '
        'determining the likelihood of a person applying for a policy."\n'
        '  expr: as_int(fill_missing(str_extract_int(col("Upper_Age")), 0)\n'
        '      - fill_missing(str_extract_int(col("Lower_Age")), 0))\n'
        "}\n"
        "```end\n"
    )
    return [failing, fixed]


def write_insurance_csv(path: str | Path, n_repeats: int = 10) -> None:
    """Small policy-lead fixture whose Lower_Age column has no digit runs."""
    rows = [
        ("C33", "Owned", "31", "1"),
        ("C2", "Rented", "55", "0"),
        ("C3", "Rented", "42", "0"),
        ("C14", "Owned", "28", "1"),
        ("C5", "Rented", "63", "0"),
        ("C21", "Owned", "37", "1"),
    ]
    lines = ["Upper_Age,Lower_Age,Premium,Response"]
    for i in range(n_repeats):
        for a, b, c, d in rows:
            lines.append(f"{a},{b},{float(c) + i},{d}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
