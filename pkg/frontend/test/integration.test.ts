/**
 * End-to-end: the client code drives the identity proof against a live
 * kernel server over a real WebSocket, and the exported script replays
 * to the same final state record.
 */

import { ChildProcess, spawn } from 'node:child_process';
import net from 'node:net';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';
import WebSocket from 'ws';

import { ProofApp } from '../src/app.js';
import { Connection, SocketLike } from '../src/connection.js';
import { StateRecord } from '../src/protocol.js';

const ID_GOAL = '(∀ (A : Type) (a : A) A)';

let server: ChildProcess;
let port: number;

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const srv = net.createServer();
    srv.listen(0, '127.0.0.1', () => {
      const addr = srv.address();
      if (addr && typeof addr === 'object') {
        const p = addr.port;
        srv.close(() => resolve(p));
      } else {
        reject(new Error('no port'));
      }
    });
  });
}

function waitForServer(p: number, deadlineMs = 20000): Promise<void> {
  const start = Date.now();
  return new Promise((resolve, reject) => {
    const attempt = () => {
      const sock = net.connect(p, '127.0.0.1');
      sock.once('connect', () => {
        sock.destroy();
        resolve();
      });
      sock.once('error', () => {
        sock.destroy();
        if (Date.now() - start > deadlineMs) reject(new Error('server did not start'));
        else setTimeout(attempt, 150);
      });
    };
    attempt();
  });
}

function connect(): Promise<{ app: ProofApp; conn: Connection }> {
  return new Promise((resolve, reject) => {
    const sockets = (u: string) => new WebSocket(u) as unknown as SocketLike;
    let app: ProofApp;
    const conn = new Connection(`ws://127.0.0.1:${port}/ws`, sockets, {
      onStatus: (status) => {
        app?.setConnection(status);
        if (status === 'connected') resolve({ app, conn });
      },
    });
    app = new ProofApp(conn);
    setTimeout(() => reject(new Error('connect timeout')), 10000);
  });
}

beforeAll(async () => {
  port = await freePort();
  server = spawn('python3', ['-m', 'cur_kernel.cli', 'serve', '--port', String(port)], {
    stdio: 'ignore',
  });
  await waitForServer(port);
}, 30000);

afterAll(() => {
  server?.kill();
});

describe('browser client against a live server', () => {
  it('drives the id proof to "Proof complete (2 steps)"', async () => {
    const { app, conn } = await connect();
    await app.startProof(ID_GOAL);
    expect(app.snapshot().record?.goal).toBe(ID_GOAL);

    await app.submitTactic('(intros A a)');
    let record = app.snapshot().record!;
    expect(record.hypotheses).toEqual([
      { name: 'A', type: 'Type' },
      { name: 'a', type: 'A' },
    ]);
    expect(record.goal).toBe('A');

    await app.submitTactic('assumption');
    record = app.snapshot().record!;
    expect(record.complete).toBe(true);
    expect(record.steps).toBe(2);
    expect(`Proof complete (${record.steps} steps)`).toBe('Proof complete (2 steps)');
    conn.close();
  }, 20000);

  it('exported script replays to the same state record', async () => {
    const first = await connect();
    await first.app.startProof(ID_GOAL);
    await first.app.submitTactic('(intros A a)');
    await first.app.submitTactic('assumption');
    const finalRecord = first.app.snapshot().record as StateRecord;
    const script = await first.app.exportScript();
    expect(script).toBe('(intros A a)\nassumption\n');
    first.conn.close();

    const second = await connect();
    await second.app.startProof(ID_GOAL);
    for (const line of script.trim().split('\n')) {
      await second.app.submitTactic(line);
    }
    expect(second.app.snapshot().record).toEqual(finalRecord);
    second.conn.close();
  }, 20000);

  it('failing tactics leave the panels unchanged', async () => {
    const { app, conn } = await connect();
    await app.startProof(ID_GOAL);
    const before = app.snapshot().record;
    await app.submitTactic('assumption');
    expect(app.snapshot().error).toMatch(/no assumption/);
    expect(app.snapshot().record).toEqual(before);
    conn.close();
  }, 20000);
});
