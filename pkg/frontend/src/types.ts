/** Payload types for the session API (see docs/api-schema.json). */

export interface Metrics {
  roc_auc: number;
  accuracy: number;
}

export interface Outcome {
  per_split_before: Metrics[];
  per_split_after: Metrics[];
  mean_before_auc: number;
  mean_before_acc: number;
  mean_after_auc: number;
  mean_after_acc: number;
  mean_delta_auc: number;
  mean_delta_acc: number;
  decision_score: number;
  accepted: boolean;
}

export interface ExecErrorPayload {
  kind: string;
  message: string;
  line: number | null;
  column: number | null;
  rendered: string;
}

export interface Usage {
  prompt_tokens: number;
  completion_tokens: number;
  estimated_cost: number;
  latency: number;
}

export interface IterationRecord {
  index: number;
  prompt: string;
  raw_response: string;
  extracted_code: string | null;
  script_text: string | null;
  error: ExecErrorPayload | null;
  outcome: Outcome | null;
  decision: "accepted" | "rejected" | "error";
  human_override: boolean | null;
  decision_note: string | null;
  feedback_text: string;
  usage: Usage;
  wall_time: number;
  table_hash: string;
}

/** Snapshot delivered with candidate_ready / decision_required events. */
export interface CandidateSnapshot {
  index: number;
  script_text: string | null;
  usefulness: string[];
  outcome: Outcome;
  recommended: boolean;
}

export type EventKind =
  | "iteration_started"
  | "candidate_ready"
  | "decision_required"
  | "iteration_finished"
  | "session_finished";

export interface ApiEvent {
  seq: number;
  kind: EventKind;
  iteration: number;
  payload: Record<string, unknown>;
}

export interface SessionInfo {
  config: Record<string, unknown>;
  baseline: { mean_roc_auc: number; mean_accuracy: number } | null;
  finished: boolean;
  error: string | null;
}

export type CardStatus = "accepted" | "rejected" | "error" | "awaiting-decision";
