"""Command-line entry points: run, apply, eval, serve.

Exit codes: 0 success, 2 usage, 3 data error, 4 LLM error, 5 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
import threading
from pathlib import Path

from .engine import (
    ScriptedDecisions,
    SessionConfig,
    apply_final,
    format_mean_std,
    run_benchmark,
    run_session,
    write_benchmark_report,
)
from .fedsl import ExecError, parse as parse_script, validate as validate_script, evaluate as evaluate_script
from .llm import LlmConfig, LlmError, load_playbook
from .models import ModelSpec
from .server import SessionHost, load_finished_session, make_server
from .tabular import SplitPlan, TabularError, load_csv, parse_schema_override, write_csv

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_LLM = 4
EXIT_INTERNAL = 5

_MODEL_KINDS = {"logreg": "logistic_regression", "forest": "random_forest"}


def _add_session_flags(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--data", required=required, help="CSV dataset path")
    p.add_argument("--target", required=required, help="name of the prediction column")
    p.add_argument("--description", help="path to the dataset description text")
    p.add_argument("--iterations", type=int, default=10)
    p.add_argument("--model", choices=sorted(_MODEL_KINDS), default="logreg")
    p.add_argument("--llm", choices=["http", "scripted"], default="http")
    p.add_argument("--playbook", help="JSON array of canned responses (scripted backend)")
    p.add_argument("--endpoint", default="https://api.openai.com/v1/chat/completions")
    p.add_argument("--model-name", default="gpt-4")
    p.add_argument("--temperature", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--blind", action="store_true", help="conceal description and column names")
    p.add_argument("--review", action="store_true", help="require explicit confirmation per change")
    p.add_argument("--out", default="session", help="session output directory")
    p.add_argument("--api-key-env", default="LLM_API_KEY")
    p.add_argument("--schema-override", help="file with one column=dtype pair per line")


def _session_config(args) -> SessionConfig:
    return SessionConfig(
        data_path=args.data,
        target=args.target,
        description_path=args.description,
        iterations=args.iterations,
        model=ModelSpec(_MODEL_KINDS[args.model], rng_seed=args.seed),
        split_plan=SplitPlan(seed=args.seed),
        llm=LlmConfig(
            backend=args.llm,
            endpoint_url=args.endpoint,
            model_name=args.model_name,
            temperature=args.temperature,
            api_key_env_var=args.api_key_env,
        ),
        decision_mode="review" if args.review else "auto",
        blinded=args.blind,
        session_seed=args.seed,
        schema_override={
            name: dtype.value
            for name, dtype in parse_schema_override(args.schema_override).items()
        }
        if args.schema_override
        else None,
    )


class StdinDecisions:
    """Interactive review channel for terminal runs."""

    def decide(self, snapshot):
        print(f"\nCandidate for iteration {snapshot['index']}:")
        print(snapshot["script_text"] or "(no script)")
        outcome = snapshot["outcome"]
        print(
            f"decision score {outcome['decision_score']:+.4f} "
            f"(recommended: {'accept' if snapshot['recommended'] else 'reject'})"
        )
        while True:
            answer = input("Accept this change? [y/n] ").strip().lower()
            if answer in ("y", "yes"):
                return True, None
            if answer in ("n", "no"):
                return False, None


def cmd_run(args) -> int:
    config = _session_config(args)
    playbook = load_playbook(args.playbook) if args.playbook else None
    channel = StdinDecisions() if args.review else None
    session = run_session(config, args.out, playbook=playbook, decision_channel=channel)
    for record in session.records:
        print(f"Iteration {record.index + 1}: {record.decision}. {record.feedback_text}")
    accepted = sum(1 for r in session.records if r.decision == "accepted")
    print(f"Session finished: {accepted}/{len(session.records)} iterations accepted.")
    print(f"Session directory: {session.out_dir}")
    return EXIT_OK


def cmd_apply(args) -> int:
    override = parse_schema_override(args.schema_override) if args.schema_override else None
    table = load_csv(args.data, target=args.target, schema_override=override)
    source = Path(args.script).read_text(encoding="utf-8")
    script = validate_script(parse_script(source), table.schema(), target=table.target)
    write_csv(evaluate_script(script, table), args.out)
    print(f"Wrote transformed dataset to {args.out}")
    return EXIT_OK


def cmd_eval(args) -> int:
    override = parse_schema_override(args.schema_override) if args.schema_override else None
    table = load_csv(args.data, target=args.target, schema_override=override)
    script = None
    if args.script:
        source = Path(args.script).read_text(encoding="utf-8")
        script = validate_script(parse_script(source), table.schema(), target=table.target)
    specs = [ModelSpec(_MODEL_KINDS[m], rng_seed=args.seed) for m in args.model]
    name = Path(args.data).stem
    report = run_benchmark([(name, table, script)], specs, args.repetitions, args.seed)
    write_benchmark_report(report, args.out)
    print(f"{'dataset':<20} {'model':<20} {'condition':<9} ROC AUC")
    for row in report.rows:
        print(
            f"{row.dataset:<20} {row.model:<20} {row.condition:<9} "
            f"{format_mean_std(row.mean_auc, row.std_auc)}"
        )
    print(f"Seeds: {list(report.seeds)}")
    print(f"Report written to {Path(args.out) / 'report.csv'}")
    return EXIT_OK


def cmd_serve(args) -> int:
    if args.session_dir:
        host_state = load_finished_session(args.session_dir)
        server = make_server(host_state, args.host, args.serve_port, args.ui_dir)
        print(
            f"Serving session {args.session_dir} at "
            f"http://{args.host}:{server.server_address[1]}/",
            flush=True,
        )
        server.serve_forever()
        return EXIT_OK
    if not args.data or not args.target:
        print("error: serve needs --session-dir, or --data and --target", file=sys.stderr)
        return EXIT_USAGE
    config = _session_config(args)
    playbook = load_playbook(args.playbook) if args.playbook else None
    from .engine import config_dict

    host_state = SessionHost(config_dict(config, config.target))
    server = make_server(host_state, args.host, args.serve_port, args.ui_dir)

    def loop() -> None:
        try:
            run_session(
                config,
                args.out,
                playbook=playbook,
                decision_channel=host_state if config.decision_mode == "review" else None,
                event_sink=host_state.on_event,
                description_holder=host_state.description_holder,
            )
        except Exception as exc:  # surfaced to UI clients via /api/session
            host_state.mark_failed(str(exc))

    baseline_path = Path(args.out) / "baseline.json"
    thread = threading.Thread(target=loop, daemon=True)
    thread.start()
    # fill in the baseline once the engine writes it
    while host_state.baseline is None and thread.is_alive():
        if baseline_path.is_file():
            try:
                host_state.baseline = json.loads(baseline_path.read_text(encoding="utf-8"))
            except ValueError:
                pass
        else:
            thread.join(timeout=0.05)
    print(
        f"Serving live session at http://{args.host}:{server.server_address[1]}/",
        flush=True,
    )
    server.serve_forever()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="feng", description="LLM-driven feature engineering for tabular data"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a feature-engineering session")
    _add_session_flags(p_run)
    p_run.set_defaults(func=cmd_run)

    p_apply = sub.add_parser("apply", help="apply a saved script to a CSV")
    p_apply.add_argument("--script", required=True, help="path to a .fedsl script")
    p_apply.add_argument("--data", required=True)
    p_apply.add_argument("--target", required=True)
    p_apply.add_argument("--out", required=True, help="output CSV path")
    p_apply.add_argument("--schema-override")
    p_apply.set_defaults(func=cmd_apply)

    p_eval = sub.add_parser("eval", help="benchmark with/without an engineered script")
    p_eval.add_argument("--data", required=True)
    p_eval.add_argument("--target", required=True)
    p_eval.add_argument("--script", help="path to a .fedsl script (default: identity)")
    p_eval.add_argument(
        "--model",
        choices=sorted(_MODEL_KINDS),
        nargs="+",
        default=["logreg"],
    )
    p_eval.add_argument("--repetitions", type=int, default=5)
    p_eval.add_argument("--seed", type=int, default=0)
    p_eval.add_argument("--out", default="benchmark", help="report output directory")
    p_eval.add_argument("--schema-override")
    p_eval.set_defaults(func=cmd_eval)

    p_serve = sub.add_parser("serve", help="serve the review API and dashboard")
    p_serve.add_argument("--session-dir", help="browse an existing session directory")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--serve-port", type=int, default=8765)
    p_serve.add_argument("--ui-dir", help="static dashboard bundle directory")
    _add_session_flags(p_serve, required=False)
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (TabularError, FileNotFoundError, ExecError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except LlmError as exc:
        print(f"LLM error: {exc}", file=sys.stderr)
        return EXIT_LLM
    except KeyboardInterrupt:
        return EXIT_INTERNAL
    except Exception as exc:  # pragma: no cover - safety net
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
