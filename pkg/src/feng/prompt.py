"""Deterministic prompt construction from dataset context, history, and feedback.

The rendered prompt is a pure function of PromptContext. Sections, in order:
dataset description (or the blinded notice), per-column summary lines,
training row count, task instructions with the function whitelist, the
chain-of-thought code template inside a single fence pair, previously
accepted scripts, and the prior-iteration feedback block.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .fedsl.functions import whitelist_doc_lines
from .tabular import ColumnSummary, Table, render_summary_line

FENCE_OPEN = "```fedsl"
FENCE_CLOSE = "```end"
ERROR_FEEDBACK_PREFIX = "Feedback: failed with error: "
BLINDED_DESCRIPTION = "(withheld for this run)"

SAMPLES_SHOWN = 3  # values displayed per column line, drawn from the sampled rows


def blind_name(index: int) -> str:
    return f"c{index}"


def blind_table(table: Table) -> tuple[Table, dict[str, str]]:
    """Positionally rename every column (target included) to c0..c{M-1}."""
    names = [blind_name(i) for i in range(len(table.columns))]
    mapping = {c.name: n for c, n in zip(table.columns, names)}
    return table.renamed_positionally(names), mapping


@dataclass(frozen=True)
class Feedback:
    """Prior-iteration result: exactly one of error or performance text."""

    error: str | None = None
    performance: str | None = None


@dataclass(frozen=True)
class PromptContext:
    description: str
    column_summaries: tuple[ColumnSummary, ...]
    train_row_count: int
    target_name: str
    accepted_scripts: tuple[str, ...] = ()
    feedback: Feedback | None = None
    blinded: bool = False


def _blinded_summaries(summaries: tuple[ColumnSummary, ...]) -> list[ColumnSummary]:
    return [
        ColumnSummary(blind_name(i), s.dtype, s.missing_fraction, s.samples)
        for i, s in enumerate(summaries)
    ]


def build_prompt(ctx: PromptContext) -> str:
    if not ctx.column_summaries:
        raise ValueError("column_summaries must not be empty")
    summaries = list(ctx.column_summaries)
    target = ctx.target_name
    description = ctx.description
    if ctx.blinded:
        target_index = next(
            i for i, s in enumerate(summaries) if s.name == ctx.target_name
        )
        summaries = _blinded_summaries(ctx.column_summaries)
        target = blind_name(target_index)
        description = BLINDED_DESCRIPTION

    lines: list[str] = []
    lines.append(
        "The dataset is loaded and in memory as the table df. Columns are "
        'addressed as col("name") in the feature language described below.'
    )
    lines.append("Description of the dataset in df (column dtypes might be inaccurate):")
    lines.append(f'"{description}"')
    lines.append("")
    lines.append("Columns in df (true feature dtypes listed here, categoricals shown as int):")
    for s in summaries:
        lines.append(render_summary_line(s, max_samples=SAMPLES_SHOWN))
    lines.append("")
    lines.append(f"Number of samples (rows) in training dataset: {ctx.train_row_count}")
    lines.append("")
    lines.append(
        "This code was written by an expert data scientist working to improve "
        "predictions. It is a codeblock in a small feature language that adds "
        "new columns to the dataset."
    )
    lines.append(
        "Columns are built from expressions over existing columns: arithmetic "
        "(+ - * /), comparisons (== != < <= > >=), boolean logic (and, or, not), "
        "number/text/true/false literals, and exactly these functions:"
    )
    lines.extend(whitelist_doc_lines())
    lines.append("")
    lines.append(
        "This code generates additional columns that are useful for a downstream "
        f'classification algorithm predicting "{target}".'
    )
    lines.append(
        "Additional columns add new semantic information, that is they use real "
        "world knowledge on the dataset. They can e.g. be feature combinations, "
        "transformations or binnings where the new column is a function of the "
        "existing columns."
    )
    lines.append(
        "The scale of columns and offset does not matter. Make sure all used "
        "columns exist. Follow the above description of columns closely and "
        "consider the datatypes and meanings of classes."
    )
    lines.append(
        "This code also drops columns, if these may be redundant and hurt the "
        "predictive performance of the downstream classifier (Feature selection). "
        "Dropping columns may help as the chance of overfitting is lower, "
        "especially if the dataset is small."
    )
    lines.append(
        "The classifier will be trained on the dataset with the generated columns "
        "and evaluated on a holdout set. The best performing code will be selected."
    )
    lines.append(
        "Added columns can be used in other codeblocks, dropped columns are not "
        "available anymore."
    )
    lines.append("")
    lines.append("Code formatting, for each added column one reasoning comment trio and one statement:")
    lines.append(FENCE_OPEN)
    lines.append("# (Feature name and description)")
    lines.append(
        "# Usefulness: (Description why this adds useful real world knowledge "
        "to classify the target according to dataset description and attributes.)"
    )
    lines.append(
        "# Input samples: (Three samples of the columns used, e.g. "
        "'column_one': [1.0, 2.0, 0.0], 'column_two': ['u', 'w', 'u'], ...)"
    )
    lines.append('feature "FeatureName" {')
    lines.append('  usefulness: "Why this adds useful real world knowledge for the prediction"')
    lines.append('  expr: (an expression over col("..."), literals, and the functions above)')
    lines.append("}")
    lines.append('drop "ColumnName" reason "Why the column is redundant"')
    lines.append(FENCE_CLOSE)
    lines.append("")
    lines.append(
        "One codeblock may define several features and drop redundant columns "
        "(Feature selection)."
    )
    lines.append(
        "Each codeblock starts with the opening fence and ends with the end "
        "fence exactly as shown above."
    )
    if ctx.accepted_scripts:
        lines.append("")
        lines.append("Previously accepted codeblocks (already applied to df):")
        for text in ctx.accepted_scripts:
            lines.append(text.rstrip("\n"))
    if ctx.feedback is not None:
        lines.append("")
        if ctx.feedback.error is not None:
            lines.append(f"{ERROR_FEEDBACK_PREFIX}{ctx.feedback.error}")
        else:
            lines.append(ctx.feedback.performance or "")
    lines.append("")
    lines.append("Codeblock:")
    return "\n".join(lines) + "\n"


def render_performance_feedback(outcome, accepted: bool | None = None) -> str:
    """Fixed-format before/after sentence, three decimals, with the verdict.

    outcome exposes mean_before_auc/acc, mean_after_auc/acc, and accepted;
    pass `accepted` to override the rule's verdict with a reviewer's decision.
    """
    final = outcome.accepted if accepted is None else accepted
    verdict = (
        "Code was executed and changes to df retained."
        if final
        else "Code was executed but changes to df discarded."
    )
    return (
        f"Performance before adding features ROC {outcome.mean_before_auc:.3f}, "
        f"ACC {outcome.mean_before_acc:.3f}. "
        f"Performance after adding features ROC {outcome.mean_after_auc:.3f}, "
        f"ACC {outcome.mean_after_acc:.3f}. "
        f"Improvement ROC {outcome.mean_delta_auc:.3f}, "
        f"ACC {outcome.mean_delta_acc:.3f}. "
        f"{verdict}"
    )
