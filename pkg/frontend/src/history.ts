/** Bounded log of past checks, newest first. */

export interface CheckHistoryEntry {
  url: string;
  label: "benign" | "malicious";
  score: number;
  timestamp: number;
  latencyMs: number;
}

export const HISTORY_LIMIT = 100;

export class CheckHistory {
  private entries: CheckHistoryEntry[] = [];

  add(entry: CheckHistoryEntry): void {
    this.entries.unshift(entry);
    if (this.entries.length > HISTORY_LIMIT) {
      this.entries.length = HISTORY_LIMIT;
    }
  }

  list(): readonly CheckHistoryEntry[] {
    return this.entries;
  }

  get size(): number {
    return this.entries.length;
  }
}
