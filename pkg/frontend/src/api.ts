/** Typed client for the session API. These five endpoints are the only
 * requests the dashboard ever issues. */

import type { ApiEvent, IterationRecord, SessionInfo } from "./types.js";

export class StaleDecisionError extends Error {}

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    const resp = await this.fetchFn(`${this.baseUrl}${path}`);
    if (!resp.ok) {
      throw new Error(`GET ${path}: HTTP ${resp.status}`);
    }
    return (await resp.json()) as T;
  }

  getSession(): Promise<SessionInfo> {
    return this.getJson<SessionInfo>("/api/session");
  }

  getIterations(): Promise<IterationRecord[]> {
    return this.getJson<IterationRecord[]>("/api/iterations");
  }

  getIteration(index: number): Promise<IterationRecord> {
    return this.getJson<IterationRecord>(`/api/iterations/${index}`);
  }

  async getEvents(after: number): Promise<ApiEvent[]> {
    const body = await this.getJson<{ events: ApiEvent[] }>(
      `/api/events?after=${after}`,
    );
    return body.events;
  }

  async submitDecision(
    iteration: number,
    accept: boolean,
    note?: string,
  ): Promise<void> {
    const resp = await this.fetchFn(
      `${this.baseUrl}/api/iterations/${iteration}/decision`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(note ? { accept, note } : { accept }),
      },
    );
    if (resp.status === 409) {
      const body = (await resp.json()) as { error?: string };
      throw new StaleDecisionError(body.error ?? "stale decision");
    }
    if (!resp.ok) {
      throw new Error(`decision rejected: HTTP ${resp.status}`);
    }
  }

  async submitDescription(text: string): Promise<void> {
    const resp = await this.fetchFn(`${this.baseUrl}/api/description`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ text }),
    });
    if (!resp.ok) {
      throw new Error(`description rejected: HTTP ${resp.status}`);
    }
  }
}
