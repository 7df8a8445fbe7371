/**
 * Wire types for the proof-session protocol: one JSON object per
 * message, responses echoing the request's id.  Terms arrive as
 * printed text; the client never parses them.
 */

export interface Hypothesis {
  name: string;
  type: string;
}

/** The server's rendering of the proof state after each request. */
export interface StateRecord {
  goals_total: number;
  focused_index: number;
  hypotheses: Hypothesis[];
  goal: string;
  steps: number;
  complete: boolean;
}

export type Request =
  | { id: number; op: 'load_file'; source?: string; path?: string }
  | { id: number; op: 'start_proof'; goal: string }
  | { id: number; op: 'apply_tactic'; text: string }
  | { id: number; op: 'undo' }
  | { id: number; op: 'extract' }
  | { id: number; op: 'script' };

export interface Response {
  id?: number;
  ok: boolean;
  error?: string;
  state?: StateRecord;
  definitions?: string[];
  term?: string;
  steps?: string[];
  open_goals?: number;
}

export function parseResponse(data: string): Response {
  const obj = JSON.parse(data);
  if (typeof obj !== 'object' || obj === null || typeof obj.ok !== 'boolean') {
    throw new Error('malformed server response');
  }
  return obj as Response;
}
