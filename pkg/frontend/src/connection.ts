/**
 * WebSocket connection to the proof server with request/response
 * correlation, a single-pending-request discipline, and automatic
 * reconnection with exponential backoff.
 */

import { parseResponse, Request, Response } from './protocol.js';

/** The slice of the WebSocket interface the client uses (injectable). */
export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export type ConnectionStatus = 'connecting' | 'connected' | 'disconnected';

export interface ConnectionEvents {
  /** Status changes, including each reconnection attempt. */
  onStatus?: (status: ConnectionStatus) => void;
  /** A (re)connect succeeded: server-side session state is fresh. */
  onSessionRestart?: () => void;
}

const BACKOFF_BASE_MS = 250;
const BACKOFF_MAX_MS = 8000;

export class Connection {
  private socket: SocketLike | null = null;
  private nextId = 1;
  private pending: {
    id: number;
    resolve: (r: Response) => void;
    reject: (e: Error) => void;
  } | null = null;
  private attempts = 0;
  private closed = false;
  private retryTimer: ReturnType<typeof setTimeout> | null = null;
  status: ConnectionStatus = 'connecting';

  constructor(
    private url: string,
    private factory: SocketFactory,
    private events: ConnectionEvents = {},
    private schedule: (fn: () => void, ms: number) => ReturnType<typeof setTimeout> = setTimeout,
  ) {
    this.open();
  }

  get busy(): boolean {
    return this.pending !== null;
  }

  private setStatus(status: ConnectionStatus): void {
    this.status = status;
    this.events.onStatus?.(status);
  }

  private open(): void {
    this.setStatus('connecting');
    const socket = this.factory(this.url);
    this.socket = socket;
    socket.onopen = () => {
      this.attempts = 0;
      this.setStatus('connected');
      this.events.onSessionRestart?.();
    };
    socket.onmessage = (ev) => this.dispatch(String(ev.data));
    socket.onclose = () => this.dropped();
    socket.onerror = () => {
      /* the close handler follows and schedules the retry */
    };
  }

  private dropped(): void {
    if (this.pending) {
      this.pending.reject(new Error('connection lost'));
      this.pending = null;
    }
    if (this.closed) return;
    this.setStatus('disconnected');
    const delay = Math.min(BACKOFF_BASE_MS * 2 ** this.attempts, BACKOFF_MAX_MS);
    this.attempts += 1;
    this.retryTimer = this.schedule(() => this.open(), delay);
  }

  private dispatch(data: string): void {
    let response: Response;
    try {
      response = parseResponse(data);
    } catch {
      return; // not addressed to us; ignore
    }
    if (this.pending && (response.id === undefined || response.id === this.pending.id)) {
      const waiter = this.pending;
      this.pending = null;
      waiter.resolve(response);
    }
  }

  /**
   * Send one request; at most one may be in flight (callers disable
   * input while awaiting).
   */
  request(op: Request['op'], fields: Record<string, unknown> = {}): Promise<Response> {
    if (this.status !== 'connected' || this.socket === null) {
      return Promise.reject(new Error('not connected'));
    }
    if (this.pending) {
      return Promise.reject(new Error('a request is already pending'));
    }
    const id = this.nextId++;
    const message = JSON.stringify({ id, op, ...fields });
    return new Promise<Response>((resolve, reject) => {
      this.pending = { id, resolve, reject };
      try {
        this.socket!.send(message);
      } catch (e) {
        this.pending = null;
        reject(e instanceof Error ? e : new Error(String(e)));
      }
    });
  }

  close(): void {
    this.closed = true;
    if (this.retryTimer !== null) clearTimeout(this.retryTimer);
    this.socket?.close();
    this.setStatus('disconnected');
  }
}

/** ws:// endpoint for the page's own origin (UI and server share a port). */
export function defaultServerUrl(location: { protocol: string; host: string }): string {
  const scheme = location.protocol === 'https:' ? 'wss' : 'ws';
  return `${scheme}://${location.host}/ws`;
}
