import { describe, expect, it } from "vitest";

import {
  renderCard,
  renderSparkline,
  renderTrajectory,
  viewModelFromRecord,
  viewModelFromSnapshot,
} from "../src/cards.js";
import type { CandidateSnapshot, IterationRecord, Outcome } from "../src/types.js";

function outcome(overrides: Partial<Outcome> = {}): Outcome {
  const before = Array.from({ length: 10 }, () => ({ roc_auc: 0.888, accuracy: 0.7 }));
  const after = Array.from({ length: 10 }, () => ({ roc_auc: 0.987, accuracy: 0.98 }));
  return {
    per_split_before: before,
    per_split_after: after,
    mean_before_auc: 0.888,
    mean_before_acc: 0.7,
    mean_after_auc: 0.987,
    mean_after_acc: 0.98,
    mean_delta_auc: 0.099,
    mean_delta_acc: 0.28,
    decision_score: 0.1895,
    accepted: true,
    ...overrides,
  };
}

function record(overrides: Partial<IterationRecord> = {}): IterationRecord {
  return {
    index: 0,
    prompt: "p",
    raw_response: "r",
    extracted_code: 'feature "f" { usefulness: "adds signal" expr: 1 }',
    script_text: 'feature "f" {\n  usefulness: "adds signal"\n  expr: 1.0\n}\n',
    error: null,
    outcome: outcome(),
    decision: "accepted",
    human_override: null,
    decision_note: null,
    feedback_text: "Performance before…",
    usage: { prompt_tokens: 10, completion_tokens: 5, estimated_cost: 0.01, latency: 0 },
    wall_time: 1.0,
    table_hash: "h",
    ...overrides,
  };
}

describe("view models", () => {
  it("derives status and usefulness from a finished record", () => {
    const model = viewModelFromRecord(record());
    expect(model.status).toBe("accepted");
    expect(model.usefulness).toEqual(["adds signal"]);
    expect(model.recommended).toBe(true);
  });

  it("error records carry the rendered error text", () => {
    const model = viewModelFromRecord(
      record({
        decision: "error",
        outcome: null,
        script_text: null,
        error: {
          kind: "RuntimeError",
          message: "cannot convert missing value to integer",
          line: 3,
          column: 9,
          rendered:
            "RuntimeError at line 3, column 9: cannot convert missing value to integer",
        },
      }),
    );
    expect(model.status).toBe("error");
    expect(model.errorText).toContain("cannot convert missing value to integer");
  });

  it("snapshots become awaiting-decision cards", () => {
    const snapshot: CandidateSnapshot = {
      index: 2,
      script_text: 'feature "f" { usefulness: "u" expr: 1 }',
      usefulness: ["u"],
      outcome: outcome(),
      recommended: true,
    };
    const model = viewModelFromSnapshot(snapshot);
    expect(model.status).toBe("awaiting-decision");
    expect(model.index).toBe(2);
  });
});

describe("renderCard", () => {
  it("renders metrics to exactly three decimals", () => {
    const card = renderCard(document, viewModelFromRecord(record()));
    expect(card.querySelector(".metric-before-roc")!.textContent).toBe("0.888");
    expect(card.querySelector(".metric-after-roc")!.textContent).toBe("0.987");
    expect(card.querySelector(".metric-delta-roc")!.textContent).toBe("+0.099");
    expect(card.querySelector(".metric-delta-acc")!.textContent).toBe("+0.280");
    expect(card.querySelector(".decision-score")!.textContent).toContain("+0.190");
  });

  it("shows the status badge", () => {
    const card = renderCard(document, viewModelFromRecord(record({ decision: "rejected" })));
    expect(card.querySelector(".badge-rejected")!.textContent).toBe("rejected");
  });

  it("error cards show the verbatim error and no metrics", () => {
    const card = renderCard(
      document,
      viewModelFromRecord(
        record({
          decision: "error",
          outcome: null,
          error: {
            kind: "TypeError",
            message: "x",
            line: null,
            column: null,
            rendered: "TypeError: x",
          },
        }),
      ),
    );
    expect(card.querySelector(".error-text")!.textContent).toBe("TypeError: x");
    expect(card.querySelector(".metrics-table")).toBeNull();
  });

  it("highlights the code", () => {
    const card = renderCard(document, viewModelFromRecord(record()));
    expect(card.querySelector(".tok-keyword")).not.toBeNull();
  });

  it("awaiting cards expose accept/reject and fire the handler", () => {
    const snapshot: CandidateSnapshot = {
      index: 1,
      script_text: 'feature "f" { usefulness: "u" expr: 1 }',
      usefulness: ["u"],
      outcome: outcome(),
      recommended: false,
    };
    const calls: Array<[number, boolean, string]> = [];
    const card = renderCard(document, viewModelFromSnapshot(snapshot), {
      onDecision: (index, accept, note) => calls.push([index, accept, note]),
    });
    expect(card.querySelector(".recommendation")!.textContent).toContain("reject");
    (card.querySelector(".btn-accept") as HTMLButtonElement).click();
    expect(calls).toEqual([[1, true, ""]]);
    // the recommendation is displayed but never auto-submitted
    expect(calls.length).toBe(1);
  });

  it("finished cards have no decision buttons", () => {
    const card = renderCard(document, viewModelFromRecord(record()), {
      onDecision: () => {
        throw new Error("should not fire");
      },
    });
    expect(card.querySelector(".btn-accept")).toBeNull();
  });

  it("human decisions are flagged", () => {
    const card = renderCard(
      document,
      viewModelFromRecord(record({ human_override: true })),
    );
    expect(card.querySelector(".badge-human")).not.toBeNull();
  });
});

describe("charts", () => {
  it("sparkline draws one bar per split", () => {
    const svg = renderSparkline(document, outcome());
    expect(svg.querySelectorAll("rect").length).toBe(10);
  });

  it("trajectory draws one labelled dot per value", () => {
    const svg = renderTrajectory(document, [0.66, 0.985, 1.0]);
    expect(svg.querySelectorAll("circle").length).toBe(3);
    const labels = [...svg.querySelectorAll("text")].map((t) => t.textContent);
    expect(labels).toEqual(["0.660", "0.985", "1.000"]);
  });
});
