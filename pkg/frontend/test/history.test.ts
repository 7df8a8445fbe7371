import { describe, expect, it } from 'vitest';

import { CommandHistory } from '../src/history.js';

describe('CommandHistory', () => {
  it('recalls entries newest-first with ArrowUp', () => {
    const h = new CommandHistory();
    h.add('(intros A a)');
    h.add('assumption');
    expect(h.previous()).toBe('assumption');
    expect(h.previous()).toBe('(intros A a)');
    expect(h.previous()).toBe('(intros A a)'); // clamps at the oldest
  });

  it('walks back down to fresh input with ArrowDown', () => {
    const h = new CommandHistory();
    h.add('a');
    h.add('b');
    h.previous();
    h.previous();
    expect(h.next()).toBe('b');
    expect(h.next()).toBeNull(); // back to fresh input
    expect(h.next()).toBeNull();
  });

  it('ignores blank entries and resets the cursor on add', () => {
    const h = new CommandHistory();
    h.add('  ');
    expect(h.all()).toEqual([]);
    h.add('x');
    h.previous();
    h.add('y');
    expect(h.previous()).toBe('y');
  });
});
