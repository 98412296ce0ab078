"""The iterative feature-engineering loop.

Each turn: build the prompt (with accepted history and prior feedback), query
the backend, extract/parse/validate/execute the returned script, score it on
the shared validation splits, and keep the change only when the decision rule
(or a human reviewer) says so. Errors become feedback for the next turn. The
session directory is written incrementally, so a crash loses at most the
in-flight iteration, and a finished directory replays byte-identically
(timestamp fields aside).
"""

from __future__ import annotations

import csv as csv_module
import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Protocol

import numpy as np

from .fedsl import ExecError, FeatureScript, evaluate, parse, pretty_print, validate
from .llm import (
    LlmConfig,
    LlmError,
    ScriptedBackend,
    UsageRecord,
    accumulate_usage,
    extract_code_block,
    make_backend,
)
from .models import (
    EvalMetrics,
    ModelSpec,
    encode_labels,
    evaluate_scores,
    fit_preprocessor,
    train,
)
from .prompt import (
    Feedback,
    PromptContext,
    blind_table,
    build_prompt,
    render_performance_feedback,
)
from .tabular import Dtype, SplitPlan, Table, load_csv, make_splits, summarize

SAMPLE_ROWS = 10  # rows drawn for the per-column prompt summaries


# ---------------------------------------------------------------------------
# Configuration and outcome types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SessionConfig:
    data_path: str
    target: str
    description_path: str | None = None
    iterations: int = 10
    model: ModelSpec = field(default_factory=ModelSpec)
    split_plan: SplitPlan = field(default_factory=lambda: SplitPlan(seed=0))
    llm: LlmConfig = field(default_factory=LlmConfig)
    decision_mode: str = "auto"  # auto | review
    blinded: bool = False
    session_seed: int = 0
    schema_override: dict | None = None  # column name -> dtype name

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.decision_mode not in ("auto", "review"):
            raise ValueError(f"unknown decision_mode {self.decision_mode!r}")

    def dtype_overrides(self) -> dict[str, Dtype] | None:
        if not self.schema_override:
            return None
        return {name: Dtype(value) for name, value in self.schema_override.items()}


@dataclass(frozen=True)
class EvalOutcome:
    """P and P' across the validation splits plus the acceptance rule verdict."""

    before: tuple[EvalMetrics, ...]
    after: tuple[EvalMetrics, ...]
    mean_delta_auc: float
    mean_delta_acc: float
    decision_score: float
    accepted: bool

    @property
    def mean_before_auc(self) -> float:
        return float(np.mean([m.roc_auc for m in self.before]))

    @property
    def mean_before_acc(self) -> float:
        return float(np.mean([m.accuracy for m in self.before]))

    @property
    def mean_after_auc(self) -> float:
        return float(np.mean([m.roc_auc for m in self.after]))

    @property
    def mean_after_acc(self) -> float:
        return float(np.mean([m.accuracy for m in self.after]))


def make_outcome(before: list[EvalMetrics], after: list[EvalMetrics]) -> EvalOutcome:
    delta_auc = float(np.mean([a.roc_auc - b.roc_auc for a, b in zip(after, before)]))
    delta_acc = float(np.mean([a.accuracy - b.accuracy for a, b in zip(after, before)]))
    score = (delta_auc + delta_acc) / 2.0
    return EvalOutcome(
        tuple(before), tuple(after), delta_auc, delta_acc, score, score > 0.0
    )


@dataclass
class IterationRecord:
    index: int
    prompt: str
    raw_response: str
    extracted_code: str | None
    script_text: str | None
    error: ExecError | None
    outcome: EvalOutcome | None
    decision: str  # accepted | rejected | error
    human_override: bool | None
    decision_note: str | None
    feedback_text: str  # verbatim feedback carried into the next prompt
    usage: UsageRecord
    wall_time: float
    table_hash: str

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "prompt": self.prompt,
            "raw_response": self.raw_response,
            "extracted_code": self.extracted_code,
            "script_text": self.script_text,
            "error": None
            if self.error is None
            else {
                "kind": self.error.kind.value,
                "message": self.error.message,
                "line": self.error.line,
                "column": self.error.column,
                "rendered": self.error.render(),
            },
            "outcome": None if self.outcome is None else _outcome_dict(self.outcome),
            "decision": self.decision,
            "human_override": self.human_override,
            "decision_note": self.decision_note,
            "feedback_text": self.feedback_text,
            "usage": asdict(self.usage),
            "wall_time": self.wall_time,
            "table_hash": self.table_hash,
        }


def _outcome_dict(outcome: EvalOutcome) -> dict:
    return {
        "per_split_before": [asdict(m) for m in outcome.before],
        "per_split_after": [asdict(m) for m in outcome.after],
        "mean_before_auc": outcome.mean_before_auc,
        "mean_before_acc": outcome.mean_before_acc,
        "mean_after_auc": outcome.mean_after_auc,
        "mean_after_acc": outcome.mean_after_acc,
        "mean_delta_auc": outcome.mean_delta_auc,
        "mean_delta_acc": outcome.mean_delta_acc,
        "decision_score": outcome.decision_score,
        "accepted": outcome.accepted,
    }


@dataclass
class Session:
    config: SessionConfig
    out_dir: Path
    baseline: tuple[EvalMetrics, ...]
    records: list[IterationRecord]
    accepted_scripts: list[str]
    original_schema: dict
    table: Table  # working table with all accepted scripts applied

    @property
    def accepted_script_text(self) -> str:
        return "".join(self.accepted_scripts)


# ---------------------------------------------------------------------------
# Candidate evaluation
# ---------------------------------------------------------------------------


def _score_split(
    table: Table,
    train_idx: np.ndarray,
    valid_idx: np.ndarray,
    y: np.ndarray,
    n_classes: int,
    spec: ModelSpec,
) -> EvalMetrics:
    train_table = table.take(train_idx)
    pre = fit_preprocessor(train_table, spec.encoding)
    model = train(spec, pre.transform(train_table), y[train_idx], n_classes=n_classes)
    scores = model.predict_proba(pre.transform(table.take(valid_idx)))
    return evaluate_scores(scores, y[valid_idx])


def baseline_metrics(table: Table, plan: SplitPlan, spec: ModelSpec) -> tuple[EvalMetrics, ...]:
    y, classes = encode_labels(table.column(table.target))
    splits = make_splits(table, plan).splits
    return tuple(
        _score_split(table, tr, va, y, len(classes), spec) for tr, va in splits
    )


def _evaluate_candidate(
    base: Table, script: FeatureScript, plan: SplitPlan, spec: ModelSpec
) -> tuple[EvalOutcome, Table]:
    """P on the untransformed table, P' after the script, identical splits."""
    transformed = evaluate(script, base)  # ExecError propagates to the caller
    y, classes = encode_labels(base.column(base.target))
    splits = make_splits(base, plan).splits
    before = [_score_split(base, tr, va, y, len(classes), spec) for tr, va in splits]
    after = [_score_split(transformed, tr, va, y, len(classes), spec) for tr, va in splits]
    return make_outcome(before, after), transformed


def evaluate_candidate(
    base: Table, script: FeatureScript, plan: SplitPlan, spec: ModelSpec
) -> EvalOutcome:
    return _evaluate_candidate(base, script, plan, spec)[0]


# ---------------------------------------------------------------------------
# Review channel and events
# ---------------------------------------------------------------------------


class DecisionChannel(Protocol):
    def decide(self, snapshot: dict) -> tuple[bool, str | None]: ...


class ScriptedDecisions:
    """Canned review decisions for tests and offline demos."""

    def __init__(self, decisions: list[bool]):
        self.decisions = list(decisions)
        self.cursor = 0

    def decide(self, snapshot: dict) -> tuple[bool, str | None]:
        if self.cursor >= len(self.decisions):
            raise RuntimeError("scripted decisions exhausted")
        accept = self.decisions[self.cursor]
        self.cursor += 1
        return accept, None


@dataclass(frozen=True)
class ApiEvent:
    seq: int
    kind: str  # iteration_started | candidate_ready | decision_required | iteration_finished | session_finished
    iteration: int
    payload: dict

    def to_dict(self) -> dict:
        return {
            "seq": self.seq,
            "kind": self.kind,
            "iteration": self.iteration,
            "payload": self.payload,
        }


class DescriptionHolder:
    """Mutable dataset description; edits take effect on the next iteration."""

    def __init__(self, text: str):
        self.text = text


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------


def _dump_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def config_dict(config: SessionConfig, target: str) -> dict:
    # `target` is passed separately: blinded sessions persist the blinded name
    # so the directory carries no original column names.
    return {
        "data_path": config.data_path,
        "target": target,
        "description_path": config.description_path,
        "iterations": config.iterations,
        "model": asdict(config.model),
        "split_plan": asdict(config.split_plan),
        "llm": asdict(config.llm),
        "decision_mode": config.decision_mode,
        "blinded": config.blinded,
        "session_seed": config.session_seed,
        "schema_override": config.schema_override,
    }


def _write_report(out_dir: Path, baseline: tuple[EvalMetrics, ...], records: list[IterationRecord]) -> None:
    base_auc = float(np.mean([m.roc_auc for m in baseline]))
    base_acc = float(np.mean([m.accuracy for m in baseline]))
    rows = []
    trajectory_auc = base_auc
    trajectory_acc = base_acc
    for r in records:
        if r.decision == "accepted" and r.outcome is not None:
            trajectory_auc = r.outcome.mean_after_auc
            trajectory_acc = r.outcome.mean_after_acc
        rows.append(
            {
                "iteration": r.index,
                "decision": r.decision,
                "decision_score": None if r.outcome is None else r.outcome.decision_score,
                "mean_before_auc": None if r.outcome is None else r.outcome.mean_before_auc,
                "mean_after_auc": None if r.outcome is None else r.outcome.mean_after_auc,
                "mean_before_acc": None if r.outcome is None else r.outcome.mean_before_acc,
                "mean_after_acc": None if r.outcome is None else r.outcome.mean_after_acc,
                "error_kind": None if r.error is None else r.error.kind.value,
            }
        )
    report = {
        "baseline": {"mean_roc_auc": base_auc, "mean_accuracy": base_acc},
        "iterations": rows,
        "accepted_count": sum(1 for r in records if r.decision == "accepted"),
        "final": {"mean_roc_auc": trajectory_auc, "mean_accuracy": trajectory_acc},
    }
    _dump_json(out_dir / "report.json", report)
    with open(out_dir / "report.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv_module.writer(fh)
        header = [
            "iteration",
            "decision",
            "decision_score",
            "mean_before_auc",
            "mean_after_auc",
            "mean_before_acc",
            "mean_after_acc",
            "error_kind",
        ]
        writer.writerow(header)
        for row in rows:
            writer.writerow(["" if row[k] is None else row[k] for k in header])


def _load_existing_records(out_dir: Path) -> list[dict]:
    iter_dir = out_dir / "iterations"
    if not iter_dir.is_dir():
        return []
    return [
        json.loads(p.read_text(encoding="utf-8"))
        for p in sorted(iter_dir.glob("*.json"))
    ]


# ---------------------------------------------------------------------------
# The loop
# ---------------------------------------------------------------------------


def run_session(
    config: SessionConfig,
    out_dir: str | Path,
    playbook: list[str] | None = None,
    decision_channel: DecisionChannel | None = None,
    event_sink: Callable[[ApiEvent], None] | None = None,
    description_holder: DescriptionHolder | None = None,
) -> Session:
    if config.decision_mode == "review" and decision_channel is None:
        raise ValueError("review mode requires a decision channel")
    out = Path(out_dir)
    (out / "iterations").mkdir(parents=True, exist_ok=True)
    (out / "prompts").mkdir(exist_ok=True)

    table = load_csv(
        config.data_path, target=config.target, schema_override=config.dtype_overrides()
    )
    if config.blinded:
        table, _ = blind_table(table)
    target = table.target
    original_schema = {c.name: c.dtype.value for c in table.columns}

    if description_holder is None:
        text = ""
        if config.description_path:
            text = Path(config.description_path).read_text(encoding="utf-8").strip()
        description_holder = DescriptionHolder(text)

    backend = make_backend(config.llm, playbook)
    _dump_json(out / "config.json", config_dict(config, target))

    baseline = baseline_metrics(table, config.split_plan, config.model)
    _dump_json(
        out / "baseline.json",
        {
            "per_split": [asdict(m) for m in baseline],
            "mean_roc_auc": float(np.mean([m.roc_auc for m in baseline])),
            "mean_accuracy": float(np.mean([m.accuracy for m in baseline])),
            "table_hash": table.content_hash(),
        },
    )

    seq = 0

    def emit(kind: str, iteration: int, payload: dict) -> None:
        nonlocal seq
        if event_sink is not None:
            event_sink(ApiEvent(seq, kind, iteration, payload))
        seq += 1

    # Resume from whatever iterations a previous run persisted.
    records: list[IterationRecord] = []
    accepted_texts: list[str] = []
    current = table
    feedback: Feedback | None = None
    existing = _load_existing_records(out)
    for raw in existing:
        if raw["decision"] == "accepted":
            script = validate(parse(raw["script_text"]), current.schema(), target=target)
            current = evaluate(script, current)
            accepted_texts.append(raw["script_text"])
        feedback = (
            Feedback(error=raw["error"]["rendered"])
            if raw["error"] is not None
            else Feedback(performance=raw["feedback_text"])
        )
        records.append(_record_from_dict(raw))
    if existing and isinstance(backend, ScriptedBackend):
        backend.skip(len(existing))
    # the layout is complete from the start: an untouched session has an
    # empty accepted program and zeroed usage totals
    (out / "accepted.fedsl").write_text("".join(accepted_texts), encoding="utf-8")
    _dump_json(
        out / "usage.json", asdict(accumulate_usage([r.usage for r in records]))
    )

    for index in range(len(records), config.iterations):
        emit("iteration_started", index, {})
        started = time.monotonic()
        pre_hash = current.content_hash()
        summaries = summarize(
            current,
            n_samples=min(SAMPLE_ROWS, current.row_count),
            rng_seed=config.session_seed,
        )
        ctx = PromptContext(
            description=description_holder.text,
            column_summaries=tuple(summaries),
            train_row_count=current.row_count,
            target_name=target,
            accepted_scripts=tuple(accepted_texts),
            feedback=feedback,
            blinded=config.blinded,
        )
        prompt_text = build_prompt(ctx)
        (out / "prompts" / f"{index:03d}.txt").write_text(prompt_text, encoding="utf-8")

        try:
            response, usage = backend.complete(prompt_text)
        except LlmError:
            _write_report(out, baseline, records)
            raise

        extracted = script_text = None
        error: ExecError | None = None
        outcome: EvalOutcome | None = None
        transformed: Table | None = None
        script: FeatureScript | None = None
        try:
            extracted = extract_code_block(response)
            script = validate(parse(extracted), current.schema(), target=target)
            script_text = pretty_print(script)
            outcome, transformed = _evaluate_candidate(
                current, script, config.split_plan, config.model
            )
        except ExecError as exc:
            error = exc

        human_override: bool | None = None
        decision_note: str | None = None
        if error is not None:
            decision = "error"
            feedback = Feedback(error=error.render())
        else:
            final_accept = outcome.accepted
            if config.decision_mode == "review":
                snapshot = {
                    "index": index,
                    "script_text": script_text,
                    "usefulness": [
                        s.usefulness
                        for s in script.statements
                        if hasattr(s, "usefulness")
                    ],
                    "outcome": _outcome_dict(outcome),
                    "recommended": outcome.accepted,
                }
                emit("candidate_ready", index, snapshot)
                emit("decision_required", index, snapshot)
                final_accept, decision_note = decision_channel.decide(snapshot)
                human_override = True
            if final_accept:
                decision = "accepted"
                current = transformed
                accepted_texts.append(script_text)
                (out / "accepted.fedsl").write_text(
                    "".join(accepted_texts), encoding="utf-8"
                )
            else:
                decision = "rejected"
            feedback = Feedback(
                performance=render_performance_feedback(outcome, accepted=final_accept)
            )

        if decision != "accepted":
            # rollback safety: a rejected or error turn must leave the table as it was
            assert current.content_hash() == pre_hash, "rollback violated"

        record = IterationRecord(
            index=index,
            prompt=prompt_text,
            raw_response=response,
            extracted_code=extracted,
            script_text=script_text,
            error=error,
            outcome=outcome,
            decision=decision,
            human_override=human_override,
            decision_note=decision_note,
            feedback_text=feedback.error if feedback.error is not None else feedback.performance,
            usage=usage,
            wall_time=time.monotonic() - started,
            table_hash=current.content_hash(),
        )
        records.append(record)
        _dump_json(out / "iterations" / f"{index:03d}.json", record.to_dict())
        _dump_json(
            out / "usage.json",
            asdict(accumulate_usage([r.usage for r in records])),
        )
        emit("iteration_finished", index, record.to_dict())

    _write_report(out, baseline, records)
    emit("session_finished", len(records) - 1, {})
    return Session(
        config=config,
        out_dir=out,
        baseline=baseline,
        records=records,
        accepted_scripts=accepted_texts,
        original_schema=original_schema,
        table=current,
    )


def _record_from_dict(raw: dict) -> IterationRecord:
    from .fedsl.errors import ErrorKind

    error = None
    if raw["error"] is not None:
        error = ExecError(
            ErrorKind(raw["error"]["kind"]),
            raw["error"]["message"],
            raw["error"]["line"],
            raw["error"]["column"],
        )
    outcome = None
    if raw["outcome"] is not None:
        o = raw["outcome"]
        outcome = EvalOutcome(
            before=tuple(EvalMetrics(**m) for m in o["per_split_before"]),
            after=tuple(EvalMetrics(**m) for m in o["per_split_after"]),
            mean_delta_auc=o["mean_delta_auc"],
            mean_delta_acc=o["mean_delta_acc"],
            decision_score=o["decision_score"],
            accepted=o["accepted"],
        )
    return IterationRecord(
        index=raw["index"],
        prompt=raw["prompt"],
        raw_response=raw["raw_response"],
        extracted_code=raw["extracted_code"],
        script_text=raw["script_text"],
        error=error,
        outcome=outcome,
        decision=raw["decision"],
        human_override=raw["human_override"],
        decision_note=raw["decision_note"],
        feedback_text=raw["feedback_text"],
        usage=UsageRecord(**raw["usage"]),
        wall_time=raw["wall_time"],
        table_hash=raw["table_hash"],
    )


# ---------------------------------------------------------------------------
# Applying the accepted program elsewhere
# ---------------------------------------------------------------------------


def apply_final(session: Session, new_table: Table) -> Table:
    """Apply the session's accepted program to a fresh table of the same schema."""
    if session.config.blinded:
        new_table, _ = blind_table(new_table)
    schema = {c.name: c.dtype.value for c in new_table.columns}
    if schema != session.original_schema:
        ours = set(session.original_schema)
        theirs = set(schema)
        missing = sorted(ours - theirs)
        if missing:
            raise ValueError(f"schema mismatch: missing column {missing[0]!r}")
        extra = sorted(theirs - ours)
        if extra:
            raise ValueError(f"schema mismatch: unexpected column {extra[0]!r}")
        changed = sorted(
            n for n in ours if schema[n] != session.original_schema[n]
        )
        raise ValueError(f"schema mismatch: column {changed[0]!r} changed dtype")
    combined = session.accepted_script_text
    if not combined:
        return new_table
    script = validate(
        parse(combined), new_table.schema(), target=new_table.target
    )
    return evaluate(script, new_table)


# ---------------------------------------------------------------------------
# Benchmark protocol: repeated 50/50 train/test evaluation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BenchmarkRow:
    dataset: str
    model: str
    condition: str  # with | without
    mean_auc: float
    std_auc: float
    per_rep_auc: tuple[float, ...]


@dataclass(frozen=True)
class BenchmarkReport:
    rows: tuple[BenchmarkRow, ...]
    seeds: tuple[int, ...]
    repetitions: int


def format_mean_std(mean: float, std: float) -> str:
    """Mean to 4 decimals with a compact ±std, e.g. '0.6989 ±.08'."""
    std_text = f"{std:.2f}"
    if std_text.startswith("0."):
        std_text = std_text[1:]
    return f"{mean:.4f} ±{std_text}"


def run_benchmark(
    datasets: list[tuple[str, Table, FeatureScript | None]],
    specs: list[ModelSpec],
    repetitions: int = 5,
    seed: int = 0,
) -> BenchmarkReport:
    """Mean +- std test ROC AUC over `repetitions` 50/50 splits, with and
    without the engineered script; identical splits across conditions."""
    seeds = tuple(seed + r for r in range(repetitions))
    rows: list[BenchmarkRow] = []
    for name, base, script in datasets:
        tables = {"without": base}
        tables["with"] = evaluate(script, base) if script is not None else base
        y, classes = encode_labels(base.column(base.target))
        split_sets = [
            make_splits(
                base,
                SplitPlan(seed=s, n_splits=1, valid_fraction=0.5, stratified=True),
            ).splits[0]
            for s in seeds
        ]
        for spec in specs:
            for condition, table in tables.items():
                aucs = []
                for train_idx, test_idx in split_sets:
                    metrics = _score_split(table, train_idx, test_idx, y, len(classes), spec)
                    aucs.append(metrics.roc_auc)
                rows.append(
                    BenchmarkRow(
                        dataset=name,
                        model=spec.kind,
                        condition=condition,
                        mean_auc=float(np.mean(aucs)),
                        std_auc=float(np.std(aucs)),
                        per_rep_auc=tuple(aucs),
                    )
                )
    return BenchmarkReport(tuple(rows), seeds, repetitions)


def write_benchmark_report(report: BenchmarkReport, out_dir: str | Path) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _dump_json(
        out / "report.json",
        {
            "repetitions": report.repetitions,
            "seeds": list(report.seeds),
            "rows": [asdict(r) for r in report.rows],
        },
    )
    with open(out / "report.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv_module.writer(fh)
        writer.writerow(["dataset", "model", "condition", "mean_auc", "std_auc", "mean_std"])
        for r in report.rows:
            writer.writerow(
                [
                    r.dataset,
                    r.model,
                    r.condition,
                    repr(r.mean_auc),
                    repr(r.std_auc),
                    format_mean_std(r.mean_auc, r.std_auc),
                ]
            )
