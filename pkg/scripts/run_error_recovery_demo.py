"""Error-recovery demo: the first scripted codeblock converts a missing value
to an integer and fails; the failure is fed back verbatim and the second,
corrected codeblock evaluates normally."""

import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from feng.demo import insurance_playbook, write_insurance_csv
from feng.engine import SessionConfig, run_session
from feng.llm import LlmConfig
from feng.models import ModelSpec
from feng.prompt import ERROR_FEEDBACK_PREFIX
from feng.tabular import SplitPlan


def main() -> None:
    out_root = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp(prefix="feng-recovery-"))
    out_root.mkdir(parents=True, exist_ok=True)
    write_insurance_csv(out_root / "insurance.csv")
    (out_root / "description.txt").write_text(
        "Policy applications; age bounds arrived as text codes."
    )
    config = SessionConfig(
        data_path=str(out_root / "insurance.csv"),
        target="Response",
        description_path=str(out_root / "description.txt"),
        iterations=2,
        model=ModelSpec("logistic_regression"),
        split_plan=SplitPlan(seed=0),
        llm=LlmConfig(backend="scripted"),
        session_seed=0,
        schema_override={"Upper_Age": "Text", "Lower_Age": "Text"},
    )
    session = run_session(config, out_root / "session", playbook=insurance_playbook())
    first, second = session.records
    print("Iteration 1 submitted:")
    print(first.extracted_code)
    print(f"\n{ERROR_FEEDBACK_PREFIX}{first.error.render()}\n")
    print("Iteration 2 submitted (corrected):")
    print(second.extracted_code)
    print(f"\nIteration 2 outcome: {second.decision} "
          f"(decision score {second.outcome.decision_score:+.4f})")
    feedback_line = ERROR_FEEDBACK_PREFIX + first.error.render()
    print(f"feedback present verbatim in iteration 2 prompt: {feedback_line in second.prompt}")


if __name__ == "__main__":
    main()
