/** Dashboard controller: all state originates from the API, so reloading the
 * page reconstructs an identical view. A long-poll loop with a monotone event
 * cursor appends cards live; at most one card awaits a decision at a time. */

import { ApiClient, StaleDecisionError } from "./api.js";
import {
  CardViewModel,
  renderCard,
  renderTrajectory,
  viewModelFromRecord,
  viewModelFromSnapshot,
} from "./cards.js";
import { fmt3, fmtCost } from "./format.js";
import type { CandidateSnapshot, IterationRecord, SessionInfo } from "./types.js";

export class Dashboard {
  readonly api: ApiClient;
  private readonly doc: Document;
  private readonly root: HTMLElement;
  private session: SessionInfo | null = null;
  private records: IterationRecord[] = [];
  private awaiting: CandidateSnapshot | null = null;
  private cursor = -1;
  private finished = false;
  private connectionLost = false;
  private inlineMessage: string | null = null;
  private polling = false;

  constructor(root: HTMLElement, baseUrl: string, fetchFn: typeof fetch = fetch) {
    this.root = root;
    this.doc = root.ownerDocument;
    this.api = new ApiClient(baseUrl, fetchFn);
  }

  /** Fetch a full snapshot, render, and start the live event loop. */
  async start(): Promise<void> {
    await this.refresh();
    this.polling = true;
    void this.pollLoop();
  }

  stop(): void {
    this.polling = false;
  }

  async refresh(): Promise<void> {
    this.session = await this.api.getSession();
    this.records = await this.api.getIterations();
    this.finished = this.session.finished;
    this.connectionLost = false;
    this.render();
  }

  private async pollLoop(): Promise<void> {
    while (this.polling && !this.finished) {
      try {
        const events = await this.api.getEvents(this.cursor);
        for (const event of events) {
          this.cursor = Math.max(this.cursor, event.seq);
          this.applyEvent(event.kind, event.payload);
        }
        if (events.length > 0) {
          if (this.session && this.session.baseline === null) {
            this.session = await this.api.getSession();
          }
          this.connectionLost = false;
          this.render();
        }
      } catch {
        this.connectionLost = true;
        this.render();
        await sleep(1000);
      }
    }
  }

  private applyEvent(kind: string, payload: Record<string, unknown>): void {
    if (kind === "decision_required") {
      this.awaiting = payload as unknown as CandidateSnapshot;
    } else if (kind === "iteration_finished") {
      const record = payload as unknown as IterationRecord;
      this.records = [...this.records.filter((r) => r.index !== record.index), record];
      this.records.sort((a, b) => a.index - b.index);
      if (this.awaiting && this.awaiting.index === record.index) {
        this.awaiting = null;
      }
    } else if (kind === "session_finished") {
      this.finished = true;
      this.awaiting = null;
    }
  }

  private async decide(index: number, accept: boolean, note: string): Promise<void> {
    try {
      await this.api.submitDecision(index, accept, note || undefined);
      this.inlineMessage = null;
    } catch (err) {
      this.inlineMessage =
        err instanceof StaleDecisionError
          ? `Stale decision: ${err.message}`
          : `Decision failed: ${String(err)}`;
      this.render();
    }
  }

  /** Card view-models in iteration order; awaiting card last. */
  cardModels(): CardViewModel[] {
    const models = this.records.map(viewModelFromRecord);
    if (this.awaiting && !this.records.some((r) => r.index === this.awaiting!.index)) {
      models.push(viewModelFromSnapshot(this.awaiting));
    }
    return models.sort((a, b) => a.index - b.index);
  }

  trajectory(): number[] {
    const values: number[] = [];
    if (this.session?.baseline) {
      values.push(this.session.baseline.mean_roc_auc);
    }
    for (const record of this.records) {
      if (record.decision === "accepted" && record.outcome) {
        values.push(record.outcome.mean_after_auc);
      }
    }
    return values;
  }

  render(): void {
    const doc = this.doc;
    this.root.textContent = "";

    if (this.connectionLost) {
      const banner = doc.createElement("div");
      banner.className = "banner banner-offline";
      banner.textContent = "Connection lost; retrying…";
      const retry = doc.createElement("button");
      retry.className = "btn-retry";
      retry.textContent = "Retry now";
      retry.addEventListener("click", () => void this.refresh());
      banner.appendChild(retry);
      this.root.appendChild(banner);
    }
    if (this.inlineMessage) {
      const note = doc.createElement("div");
      note.className = "banner banner-inline";
      note.textContent = this.inlineMessage;
      this.root.appendChild(note);
    }

    const summary = doc.createElement("section");
    summary.className = "summary";
    const baseline = this.session?.baseline;
    const baseText = baseline
      ? `baseline ROC ${fmt3(baseline.mean_roc_auc)}, ACC ${fmt3(baseline.mean_accuracy)}`
      : "baseline pending…";
    const h1 = doc.createElement("h1");
    h1.textContent = "Feature engineering session";
    summary.appendChild(h1);
    const baseEl = doc.createElement("p");
    baseEl.className = "baseline";
    baseEl.textContent = baseText;
    summary.appendChild(baseEl);

    const totals = this.usageTotals();
    const usageEl = doc.createElement("p");
    usageEl.className = "usage-totals";
    usageEl.textContent =
      `tokens ${totals.prompt}+${totals.completion}, cost ${fmtCost(totals.cost)}, ` +
      `${this.records.filter((r) => r.decision === "accepted").length} accepted`;
    summary.appendChild(usageEl);
    if (this.finished) {
      const done = doc.createElement("p");
      done.className = "session-finished";
      done.textContent = this.session?.error
        ? `session halted: ${this.session.error}`
        : "session finished";
      summary.appendChild(done);
    }
    summary.appendChild(renderTrajectory(doc, this.trajectory()));
    this.root.appendChild(summary);

    this.root.appendChild(this.renderDescriptionEditor());

    const cards = doc.createElement("div");
    cards.className = "cards";
    for (const model of this.cardModels()) {
      cards.appendChild(
        renderCard(doc, model, {
          onDecision: (index, accept, note) => void this.decide(index, accept, note),
        }),
      );
    }
    this.root.appendChild(cards);
  }

  private renderDescriptionEditor(): HTMLElement {
    const doc = this.doc;
    const editor = doc.createElement("details");
    editor.className = "description-editor";
    const label = doc.createElement("summary");
    label.textContent = "Edit dataset description (takes effect next iteration)";
    editor.appendChild(label);
    const area = doc.createElement("textarea");
    area.className = "description-text";
    editor.appendChild(area);
    const send = doc.createElement("button");
    send.className = "btn-description";
    send.textContent = "Update description";
    send.addEventListener("click", () => {
      void this.api.submitDescription(area.value).catch((err) => {
        this.inlineMessage = `Description update failed: ${String(err)}`;
        this.render();
      });
    });
    editor.appendChild(send);
    return editor;
  }

  private usageTotals(): { prompt: number; completion: number; cost: number } {
    let prompt = 0;
    let completion = 0;
    let cost = 0;
    for (const record of this.records) {
      prompt += record.usage.prompt_tokens;
      completion += record.usage.completion_tokens;
      cost += record.usage.estimated_cost;
    }
    return { prompt, completion, cost };
  }
}

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}
