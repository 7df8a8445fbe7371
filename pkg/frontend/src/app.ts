/**
 * The client-side proof state: a thin mirror of the server's last
 * state record plus connection/banner bookkeeping.  Panels render from
 * this and nothing else — the proof state is never mutated locally.
 */

import { Connection } from './connection.js';
import { CommandHistory } from './history.js';
import { Response, StateRecord } from './protocol.js';

export interface ClientState {
  connection: 'connecting' | 'connected' | 'disconnected';
  /** Most recent state record from the server; panels mirror this. */
  record: StateRecord | null;
  /** Inline message from the last failing tactic (panels unchanged). */
  error: string | null;
  /** Whether a request is awaiting its response (input disabled). */
  pending: boolean;
  goal: string;
}

export type Listener = (state: ClientState) => void;

export class ProofApp {
  readonly history = new CommandHistory();
  private listeners: Listener[] = [];
  private state: ClientState = {
    connection: 'connecting',
    record: null,
    error: null,
    pending: false,
    goal: '',
  };

  constructor(private conn: Connection) {}

  snapshot(): ClientState {
    return { ...this.state };
  }

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
    listener(this.snapshot());
  }

  private update(patch: Partial<ClientState>): void {
    this.state = { ...this.state, ...patch };
    for (const l of this.listeners) l(this.snapshot());
  }

  setConnection(status: ClientState['connection']): void {
    this.update({ connection: status });
  }

  /** A reconnect restarts the server session; local history survives. */
  async onSessionRestart(): Promise<void> {
    this.update({ connection: 'connected', record: null, error: null });
    if (this.state.goal !== '') {
      await this.startProof(this.state.goal);
    }
  }

  private async roundtrip(
    op: 'start_proof' | 'apply_tactic' | 'undo' | 'script' | 'extract',
    fields: Record<string, unknown> = {},
  ): Promise<Response> {
    this.update({ pending: true });
    try {
      return await this.conn.request(op, fields);
    } finally {
      this.update({ pending: false });
    }
  }

  async startProof(goal: string): Promise<void> {
    const r = await this.roundtrip('start_proof', { goal });
    if (r.ok && r.state) {
      this.update({ goal, record: r.state, error: null });
    } else {
      this.update({ error: r.error ?? 'start_proof failed' });
    }
  }

  /**
   * Send one tactic.  On success the panels re-render from the new
   * record; on error the message shows inline and the panels keep the
   * old record (tactics are transactional server-side).
   */
  async submitTactic(text: string): Promise<void> {
    if (text.trim() === '') return;
    this.history.add(text);
    const r = await this.roundtrip('apply_tactic', { text });
    if (r.ok && r.state) {
      this.update({ record: r.state, error: null });
    } else {
      this.update({ error: r.error ?? 'tactic failed' });
    }
  }

  async undo(): Promise<void> {
    const r = await this.roundtrip('undo');
    if (r.ok && r.state) {
      this.update({ record: r.state, error: null });
    } else {
      this.update({ error: r.error ?? 'undo failed' });
    }
  }

  /** The accumulated script as replayable text, one tactic per line. */
  async exportScript(): Promise<string> {
    const r = await this.roundtrip('script');
    if (!r.ok || !r.steps) {
      throw new Error(r.error ?? 'script failed');
    }
    return r.steps.map((s) => s + '\n').join('');
  }
}

/** The completion banner text, mirroring the terminal prover. */
export function completionBanner(record: StateRecord): string {
  return `Proof complete (${record.steps} steps)`;
}
