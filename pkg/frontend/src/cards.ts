/** Pure DOM builders for iteration cards and charts. All numbers are
 * rendered with fmt3 so they match the API payload to three decimals. */

import { fmt3, fmtSigned3, highlightCode } from "./format.js";
import type {
  CandidateSnapshot,
  CardStatus,
  IterationRecord,
  Outcome,
} from "./types.js";

export interface CardViewModel {
  index: number;
  status: CardStatus;
  code: string | null;
  usefulness: string[];
  outcome: Outcome | null;
  errorText: string | null;
  recommended: boolean | null;
  humanOverride: boolean | null;
}

const USEFULNESS_PATTERN = /usefulness:\s*"((?:[^"\\]|\\.)*)"/g;

function usefulnessFromCode(code: string | null): string[] {
  if (!code) return [];
  return [...code.matchAll(USEFULNESS_PATTERN)].map((m) =>
    m[1].replace(/\\(.)/g, "$1"),
  );
}

export function viewModelFromRecord(record: IterationRecord): CardViewModel {
  return {
    index: record.index,
    status: record.decision,
    code: record.script_text ?? record.extracted_code,
    usefulness: usefulnessFromCode(record.script_text),
    outcome: record.outcome,
    errorText: record.error ? record.error.rendered : null,
    recommended: record.outcome ? record.outcome.accepted : null,
    humanOverride: record.human_override,
  };
}

export function viewModelFromSnapshot(snapshot: CandidateSnapshot): CardViewModel {
  return {
    index: snapshot.index,
    status: "awaiting-decision",
    code: snapshot.script_text,
    usefulness: snapshot.usefulness,
    outcome: snapshot.outcome,
    errorText: null,
    recommended: snapshot.recommended,
    humanOverride: null,
  };
}

const STATUS_LABELS: Record<CardStatus, string> = {
  accepted: "accepted",
  rejected: "rejected",
  error: "error",
  "awaiting-decision": "awaiting decision",
};

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

/** Inline SVG bar sparkline of per-split AUC deltas. */
export function renderSparkline(doc: Document, outcome: Outcome): SVGElement {
  const deltas = outcome.per_split_after.map(
    (after, i) => after.roc_auc - outcome.per_split_before[i].roc_auc,
  );
  const width = 8;
  const svg = doc.createElementNS("http://www.w3.org/2000/svg", "svg");
  svg.setAttribute("class", "sparkline");
  svg.setAttribute("viewBox", `0 0 ${deltas.length * width} 24`);
  svg.setAttribute("width", String(deltas.length * width * 2));
  svg.setAttribute("height", "24");
  const scale = Math.max(0.01, ...deltas.map((d) => Math.abs(d)));
  deltas.forEach((delta, i) => {
    const h = (Math.abs(delta) / scale) * 11;
    const bar = doc.createElementNS("http://www.w3.org/2000/svg", "rect");
    bar.setAttribute("x", String(i * width + 1));
    bar.setAttribute("width", String(width - 2));
    bar.setAttribute("y", delta >= 0 ? String(12 - h) : "12");
    bar.setAttribute("height", String(Math.max(h, 0.5)));
    bar.setAttribute("class", delta >= 0 ? "spark-up" : "spark-down");
    const title = doc.createElementNS("http://www.w3.org/2000/svg", "title");
    title.textContent = `split ${i}: ${fmtSigned3(delta)}`;
    bar.appendChild(title);
    svg.appendChild(bar);
  });
  return svg;
}

function metricsBlock(doc: Document, outcome: Outcome): HTMLElement {
  const block = el(doc, "div", "metrics");
  const rows: Array<[string, string, string, string]> = [
    ["ROC", fmt3(outcome.mean_before_auc), fmt3(outcome.mean_after_auc), fmtSigned3(outcome.mean_delta_auc)],
    ["ACC", fmt3(outcome.mean_before_acc), fmt3(outcome.mean_after_acc), fmtSigned3(outcome.mean_delta_acc)],
  ];
  const table = el(doc, "table", "metrics-table");
  const head = el(doc, "tr");
  for (const label of ["", "before", "after", "delta"]) {
    head.appendChild(el(doc, "th", undefined, label));
  }
  table.appendChild(head);
  for (const [name, before, after, delta] of rows) {
    const tr = el(doc, "tr");
    tr.appendChild(el(doc, "th", undefined, name));
    tr.appendChild(el(doc, "td", `metric-before-${name.toLowerCase()}`, before));
    tr.appendChild(el(doc, "td", `metric-after-${name.toLowerCase()}`, after));
    tr.appendChild(el(doc, "td", `metric-delta-${name.toLowerCase()}`, delta));
    table.appendChild(tr);
  }
  block.appendChild(table);
  const score = el(
    doc,
    "div",
    "decision-score",
    `decision score ${fmtSigned3(outcome.decision_score)}`,
  );
  block.appendChild(score);
  block.appendChild(renderSparkline(doc, outcome));
  return block;
}

export interface DecisionHandlers {
  onDecision: (index: number, accept: boolean, note: string) => void;
}

export function renderCard(
  doc: Document,
  model: CardViewModel,
  handlers?: DecisionHandlers,
): HTMLElement {
  const card = el(doc, "section", `card card-${model.status}`);
  card.dataset.iteration = String(model.index);
  const header = el(doc, "header", "card-header");
  header.appendChild(el(doc, "h2", undefined, `Iteration ${model.index + 1}`));
  header.appendChild(el(doc, "span", `badge badge-${model.status}`, STATUS_LABELS[model.status]));
  if (model.humanOverride) {
    header.appendChild(el(doc, "span", "badge badge-human", "human decision"));
  }
  card.appendChild(header);

  if (model.code) {
    const pre = el(doc, "pre", "code");
    const codeNode = el(doc, "code");
    codeNode.innerHTML = highlightCode(model.code);
    pre.appendChild(codeNode);
    card.appendChild(pre);
  }
  if (model.usefulness.length > 0) {
    const list = el(doc, "ul", "usefulness");
    for (const text of model.usefulness) {
      list.appendChild(el(doc, "li", undefined, text));
    }
    card.appendChild(list);
  }
  if (model.outcome) {
    card.appendChild(metricsBlock(doc, model.outcome));
  }
  if (model.errorText) {
    card.appendChild(el(doc, "pre", "error-text", model.errorText));
  }
  if (model.status === "awaiting-decision" && handlers) {
    card.appendChild(renderDecisionPanel(doc, model, handlers));
  }
  return card;
}

function renderDecisionPanel(
  doc: Document,
  model: CardViewModel,
  handlers: DecisionHandlers,
): HTMLElement {
  const panel = el(doc, "div", "decision-panel");
  const hint =
    model.recommended === null
      ? "no recommendation"
      : model.recommended
        ? "rule recommends: accept"
        : "rule recommends: reject";
  panel.appendChild(el(doc, "p", "recommendation", hint));
  const note = el(doc, "textarea", "decision-note") as HTMLTextAreaElement;
  note.placeholder = "optional note";
  panel.appendChild(note);
  const accept = el(doc, "button", "btn-accept", "Accept");
  const reject = el(doc, "button", "btn-reject", "Reject");
  accept.addEventListener("click", () =>
    handlers.onDecision(model.index, true, note.value),
  );
  reject.addEventListener("click", () =>
    handlers.onDecision(model.index, false, note.value),
  );
  panel.appendChild(accept);
  panel.appendChild(reject);
  return panel;
}

/** Cumulative AUC trajectory: baseline plus each accepted iteration. */
export function renderTrajectory(doc: Document, values: number[]): SVGElement {
  const svg = doc.createElementNS("http://www.w3.org/2000/svg", "svg");
  svg.setAttribute("class", "trajectory");
  const width = Math.max(2, values.length) * 44;
  svg.setAttribute("viewBox", `0 0 ${width} 120`);
  svg.setAttribute("width", String(width * 2));
  svg.setAttribute("height", "120");
  if (values.length === 0) return svg;
  const min = Math.min(...values, 0.5);
  const span = Math.max(1e-6, Math.max(...values) - min);
  const x = (i: number) => 22 + i * 44;
  const y = (v: number) => 100 - ((v - min) / span) * 80;
  const line = doc.createElementNS("http://www.w3.org/2000/svg", "polyline");
  line.setAttribute(
    "points",
    values.map((v, i) => `${x(i)},${y(v)}`).join(" "),
  );
  line.setAttribute("class", "trajectory-line");
  line.setAttribute("fill", "none");
  svg.appendChild(line);
  values.forEach((v, i) => {
    const dot = doc.createElementNS("http://www.w3.org/2000/svg", "circle");
    dot.setAttribute("cx", String(x(i)));
    dot.setAttribute("cy", String(y(v)));
    dot.setAttribute("r", "3");
    dot.setAttribute("class", "trajectory-dot");
    svg.appendChild(dot);
    const label = doc.createElementNS("http://www.w3.org/2000/svg", "text");
    label.setAttribute("x", String(x(i)));
    label.setAttribute("y", String(y(v) - 8));
    label.setAttribute("text-anchor", "middle");
    label.setAttribute("class", "trajectory-label");
    label.textContent = fmt3(v);
    svg.appendChild(label);
  });
  return svg;
}
