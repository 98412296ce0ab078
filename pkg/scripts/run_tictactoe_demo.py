"""Offline tic-tac-toe demo: two scripted win-count features over a 10%
subsample, evaluated with logistic regression. Prints the per-iteration
performance sentences and the final trajectory."""

import sys
import tempfile
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from feng.demo import TTT_DESCRIPTION, TTT_SUBSAMPLE_SEED, encode_tictactoe, tictactoe_playbook
from feng.engine import SessionConfig, run_session
from feng.llm import LlmConfig
from feng.models import ModelSpec
from feng.tabular import SplitPlan, gen_tictactoe, subsample, write_csv


def main() -> None:
    out_root = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp(prefix="feng-ttt-"))
    out_root.mkdir(parents=True, exist_ok=True)
    table = subsample(encode_tictactoe(gen_tictactoe()), 0.1, TTT_SUBSAMPLE_SEED)
    write_csv(table, out_root / "tictactoe.csv")
    (out_root / "description.txt").write_text(TTT_DESCRIPTION)
    config = SessionConfig(
        data_path=str(out_root / "tictactoe.csv"),
        target="Class",
        description_path=str(out_root / "description.txt"),
        iterations=2,
        model=ModelSpec("logistic_regression"),
        split_plan=SplitPlan(seed=TTT_SUBSAMPLE_SEED),
        llm=LlmConfig(backend="scripted"),
        session_seed=TTT_SUBSAMPLE_SEED,
    )
    session = run_session(config, out_root / "session", playbook=tictactoe_playbook())
    baseline = float(np.mean([m.roc_auc for m in session.baseline]))
    print(f"dataset: {table.row_count} boards (10% subsample, seed {TTT_SUBSAMPLE_SEED})")
    print(f"baseline ROC AUC over {len(session.baseline)} validation splits: {baseline:.3f}\n")
    for record in session.records:
        print(f"Iteration {record.index + 1}")
        print(record.feedback_text)
        print()
    trajectory = [baseline] + [
        r.outcome.mean_after_auc for r in session.records if r.decision == "accepted"
    ]
    print("AUC trajectory:", " -> ".join(f"{v:.3f}" for v in trajectory))
    print(f"session directory: {out_root / 'session'}")


if __name__ == "__main__":
    main()
