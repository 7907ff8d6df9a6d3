/** Ordered action queue: one API call per user action, kept until it lands.
 *
 * A head that fails in transit stays at the front of the queue, so nothing is
 * lost on a transient failure and replay preserves the order the user acted
 * in; retry() re-drives the queue and a later enqueue does too. A definitive
 * server rejection is different: that call happened, so the action is done
 * and only the error sticks around for the banner.
 */

import { TransportError } from "./client.js";

export interface PendingAction {
  readonly id: number;
  readonly label: string;
}

type Runner = () => Promise<unknown>;

interface Item {
  id: number;
  label: string;
  run: Runner;
}

export class ActionQueue {
  private items: Item[] = [];
  private seq = 0;
  private draining = false;
  private current: Promise<void> = Promise.resolve();

  /** Message from the most recent failure; null once the queue drains clean. */
  lastError: string | null = null;

  constructor(private readonly onChange: () => void = () => {}) {}

  enqueue(label: string, run: Runner): void {
    this.items.push({ id: ++this.seq, label, run });
    this.onChange();
    void this.drain();
  }

  /** Drives queued actions in order; resolves when drained or stopped by a failure. */
  drain(): Promise<void> {
    if (!this.draining) {
      this.draining = true;
      this.current = this.pump().finally(() => {
        this.draining = false;
      });
    }
    return this.current;
  }

  retry(): Promise<void> {
    return this.drain();
  }

  private async pump(): Promise<void> {
    while (this.items.length > 0) {
      const head = this.items[0]!;
      try {
        await head.run();
      } catch (err) {
        this.lastError = err instanceof Error ? err.message : String(err);
        if (err instanceof TransportError) {
          // never reached the server: head stays queued for retry
          this.onChange();
          return;
        }
        // the server answered with a rejection; re-posting would duplicate it
        this.items.shift();
        this.onChange();
        continue;
      }
      this.items.shift();
      this.lastError = null;
      this.onChange();
    }
  }

  get size(): number {
    return this.items.length;
  }

  get pending(): readonly PendingAction[] {
    return this.items.map(({ id, label }) => ({ id, label }));
  }
}
