/** Local command history for the tactic input (arrow-key recall). */

export class CommandHistory {
  private entries: string[] = [];
  private cursor = -1; // -1 means "past the end" (fresh input)

  add(text: string): void {
    if (text.trim() === '') return;
    this.entries.push(text);
    this.cursor = -1;
  }

  /** Older entry (ArrowUp), or null at the top. */
  previous(): string | null {
    if (this.entries.length === 0) return null;
    if (this.cursor === -1) this.cursor = this.entries.length;
    if (this.cursor === 0) return this.entries[0];
    this.cursor -= 1;
    return this.entries[this.cursor];
  }

  /** Newer entry (ArrowDown), or null when back at fresh input. */
  next(): string | null {
    if (this.cursor === -1) return null;
    this.cursor += 1;
    if (this.cursor >= this.entries.length) {
      this.cursor = -1;
      return null;
    }
    return this.entries[this.cursor];
  }

  all(): string[] {
    return [...this.entries];
  }
}
