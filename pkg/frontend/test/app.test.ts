import { describe, expect, it } from 'vitest';

import { ProofApp, completionBanner } from '../src/app.js';
import { Connection } from '../src/connection.js';
import { FakeSocket, record } from './fakes.js';

function harness() {
  const socket = new FakeSocket();
  const conn = new Connection(
    'ws://test/ws',
    () => socket,
    {},
    () => 0 as unknown as ReturnType<typeof setTimeout>,
  );
  socket.opened();
  const app = new ProofApp(conn);
  return { app, socket };
}

describe('ProofApp', () => {
  it('mirrors the last server state record exactly', async () => {
    const { app, socket } = harness();
    const serverRecord = record({ goal: '(∀ (A : Type) (a : A) A)' });
    const p = app.startProof('(∀ (A : Type) (a : A) A)');
    socket.reply({ id: socket.lastRequest().id, ok: true, state: serverRecord });
    await p;
    expect(app.snapshot().record).toEqual(serverRecord);
    expect(app.snapshot().error).toBeNull();
  });

  it('keeps panels unchanged and shows the message on tactic errors', async () => {
    const { app, socket } = harness();
    const start = record();
    let p = app.startProof('Nat');
    socket.reply({ id: socket.lastRequest().id, ok: true, state: start });
    await p;
    p = app.submitTactic('assumption');
    socket.reply({
      id: socket.lastRequest().id,
      ok: false,
      error: 'tactic error: no assumption matches the goal',
      state: start,
    });
    await p;
    const s = app.snapshot();
    expect(s.record).toEqual(start); // unchanged
    expect(s.error).toMatch(/no assumption/);
  });

  it('disables input while a request is pending', async () => {
    const { app, socket } = harness();
    const seen: boolean[] = [];
    app.subscribe((s) => seen.push(s.pending));
    const p = app.startProof('Nat');
    expect(app.snapshot().pending).toBe(true);
    socket.reply({ id: socket.lastRequest().id, ok: true, state: record() });
    await p;
    expect(app.snapshot().pending).toBe(false);
    expect(seen).toContain(true);
  });

  it('undo and the step counter track state.steps', async () => {
    const { app, socket } = harness();
    let p = app.startProof('Nat');
    socket.reply({ id: socket.lastRequest().id, ok: true, state: record() });
    await p;
    p = app.submitTactic('(exact 2)');
    socket.reply({
      id: socket.lastRequest().id,
      ok: true,
      state: record({ steps: 1, complete: true }),
    });
    await p;
    expect(app.snapshot().record?.steps).toBe(1);
    p = app.undo();
    expect(socket.lastRequest().op).toBe('undo');
    socket.reply({ id: socket.lastRequest().id, ok: true, state: record({ steps: 0 }) });
    await p;
    expect(app.snapshot().record?.steps).toBe(0);
  });

  it('exports the script as replayable lines', async () => {
    const { app, socket } = harness();
    const p = app.exportScript();
    socket.reply({
      id: socket.lastRequest().id,
      ok: true,
      steps: ['(intros A a)', 'assumption'],
    });
    expect(await p).toBe('(intros A a)\nassumption\n');
  });

  it('restarts the proof locally after a reconnect, keeping history', async () => {
    const { app, socket } = harness();
    let p = app.startProof('Nat');
    socket.reply({ id: socket.lastRequest().id, ok: true, state: record() });
    await p;
    p = app.submitTactic('(exact 2)');
    socket.reply({ id: socket.lastRequest().id, ok: true, state: record({ steps: 1 }) });
    await p;
    const restart = app.onSessionRestart();
    socket.reply({ id: socket.lastRequest().id, ok: true, state: record() });
    await restart;
    expect(socket.lastRequest().op).toBe('start_proof');
    expect(app.history.all()).toEqual(['(exact 2)']); // history is local
  });

  it('renders the completion banner like the terminal prover', () => {
    expect(completionBanner(record({ steps: 2, complete: true }))).toBe(
      'Proof complete (2 steps)',
    );
  });
});
