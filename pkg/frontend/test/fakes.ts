import { SocketLike } from '../src/connection.js';
import { Response, StateRecord } from '../src/protocol.js';

export class FakeSocket implements SocketLike {
  sent: string[] = [];
  closed = false;
  onopen: ((ev?: unknown) => void) | null = null;
  onmessage: ((ev: { data: unknown }) => void) | null = null;
  onclose: ((ev?: unknown) => void) | null = null;
  onerror: ((ev?: unknown) => void) | null = null;

  send(data: string): void {
    this.sent.push(data);
  }

  close(): void {
    this.closed = true;
  }

  // test helpers
  opened(): void {
    this.onopen?.();
  }

  reply(obj: Response): void {
    this.onmessage?.({ data: JSON.stringify(obj) });
  }

  drop(): void {
    this.onclose?.();
  }

  lastRequest(): { id: number; op: string } & Record<string, unknown> {
    return JSON.parse(this.sent[this.sent.length - 1]);
  }
}

export function record(overrides: Partial<StateRecord> = {}): StateRecord {
  return {
    goals_total: 1,
    focused_index: 1,
    hypotheses: [],
    goal: 'Nat',
    steps: 0,
    complete: false,
    ...overrides,
  };
}
