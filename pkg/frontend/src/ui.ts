/**
 * DOM panels: connection banner, hypotheses, goal, tactic input with
 * history recall, undo, and script export.  Terms render as monospace
 * text exactly as the server printed them.
 */

import { ClientState, ProofApp, completionBanner } from './app.js';

export interface Panels {
  root: HTMLElement;
  banner: HTMLElement;
  goalInput: HTMLInputElement;
  startButton: HTMLButtonElement;
  hypotheses: HTMLElement;
  goal: HTMLElement;
  stepCounter: HTMLElement;
  tacticInput: HTMLInputElement;
  applyButton: HTMLButtonElement;
  undoButton: HTMLButtonElement;
  exportButton: HTMLButtonElement;
  errorLine: HTMLElement;
}

export function buildPanels(doc: Document, mount: HTMLElement): Panels {
  const el = <K extends keyof HTMLElementTagNameMap>(
    tag: K,
    cls: string,
    parent: HTMLElement,
  ): HTMLElementTagNameMap[K] => {
    const node = doc.createElement(tag);
    node.className = cls;
    parent.appendChild(node);
    return node;
  };

  const root = el('div', 'proof-ui', mount);
  const banner = el('div', 'banner', root);

  const goalRow = el('div', 'goal-row', root);
  const goalInput = el('input', 'goal-input', goalRow);
  goalInput.placeholder = '(∀ (A : Type) (a : A) A)';
  const startButton = el('button', 'start', goalRow);
  startButton.textContent = 'start proof';

  const statePanel = el('div', 'state', root);
  const hypotheses = el('pre', 'hypotheses', statePanel);
  el('hr', 'rule', statePanel);
  const goal = el('pre', 'goal', statePanel);
  const stepCounter = el('div', 'steps', statePanel);

  const tacticRow = el('div', 'tactic-row', root);
  const tacticInput = el('input', 'tactic-input', tacticRow);
  tacticInput.placeholder = 'tactic, e.g. (intros A a)';
  const applyButton = el('button', 'apply', tacticRow);
  applyButton.textContent = 'apply';
  const undoButton = el('button', 'undo', tacticRow);
  undoButton.textContent = 'undo';
  const exportButton = el('button', 'export', tacticRow);
  exportButton.textContent = 'export script';

  const errorLine = el('div', 'error', root);

  return {
    root,
    banner,
    goalInput,
    startButton,
    hypotheses,
    goal,
    stepCounter,
    tacticInput,
    applyButton,
    undoButton,
    exportButton,
    errorLine,
  };
}

export function render(panels: Panels, state: ClientState): void {
  if (state.connection !== 'connected') {
    panels.banner.textContent =
      state.connection === 'connecting'
        ? 'connecting…'
        : 'disconnected — retrying…';
    panels.banner.classList.add('down');
  } else if (state.record?.complete) {
    panels.banner.textContent = completionBanner(state.record);
    panels.banner.classList.remove('down');
  } else if (state.record) {
    panels.banner.textContent = `goal ${state.record.focused_index} of ${state.record.goals_total}`;
    panels.banner.classList.remove('down');
  } else {
    panels.banner.textContent = 'no active proof';
    panels.banner.classList.remove('down');
  }

  const record = state.record;
  panels.hypotheses.textContent = record
    ? record.hypotheses.map((h) => `${h.name} : ${h.type}`).join('\n')
    : '';
  panels.goal.textContent = record && !record.complete ? record.goal : '';
  panels.stepCounter.textContent = record ? `steps: ${record.steps}` : '';
  panels.errorLine.textContent = state.error ?? '';

  const locked = state.pending || state.connection !== 'connected';
  panels.tacticInput.disabled = locked || record === null || record.complete;
  panels.applyButton.disabled = panels.tacticInput.disabled;
  panels.undoButton.disabled = locked || record === null || record.steps === 0;
  panels.exportButton.disabled = locked || record === null;
  panels.goalInput.disabled = locked;
  panels.startButton.disabled = locked;
}

export function wire(doc: Document, panels: Panels, app: ProofApp): void {
  app.subscribe((state) => render(panels, state));

  panels.startButton.addEventListener('click', () => {
    void app.startProof(panels.goalInput.value);
  });

  const submit = () => {
    const text = panels.tacticInput.value;
    panels.tacticInput.value = '';
    void app.submitTactic(text);
  };
  panels.applyButton.addEventListener('click', submit);
  panels.tacticInput.addEventListener('keydown', (ev) => {
    if (ev.key === 'Enter') submit();
    else if (ev.key === 'ArrowUp') {
      const prev = app.history.previous();
      if (prev !== null) panels.tacticInput.value = prev;
      ev.preventDefault();
    } else if (ev.key === 'ArrowDown') {
      panels.tacticInput.value = app.history.next() ?? '';
      ev.preventDefault();
    }
  });

  panels.undoButton.addEventListener('click', () => void app.undo());

  panels.exportButton.addEventListener('click', () => {
    void app.exportScript().then((text) => downloadText(doc, 'proof-script.txt', text));
  });
}

export function downloadText(doc: Document, filename: string, text: string): void {
  const blob = new Blob([text], { type: 'text/plain;charset=utf-8' });
  const url = URL.createObjectURL(blob);
  const a = doc.createElement('a');
  a.href = url;
  a.download = filename;
  doc.body.appendChild(a);
  a.click();
  a.remove();
  URL.revokeObjectURL(url);
}
