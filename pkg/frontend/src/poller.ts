import { DaemonClient } from "./api";
import { PendingElection } from "./types";

export const DEFAULT_POLL_INTERVAL_MS = 1000;

export interface PollerOptions {
  intervalMs?: number;
  onChange: (pending: PendingElection[]) => void;
  onError?: (err: unknown) => void;
}

/** Polls the voter's pending-ballot list; notifies only on changes. */
export class PendingPoller {
  private readonly intervalMs: number;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private lastKey = "";
  private running = false;

  constructor(
    private readonly client: DaemonClient,
    private readonly voterId: number,
    private readonly opts: PollerOptions,
  ) {
    this.intervalMs = opts.intervalMs ?? DEFAULT_POLL_INTERVAL_MS;
  }

  start(): void {
    if (this.running) return;
    this.running = true;
    void this.tick();
  }

  stop(): void {
    this.running = false;
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
  }

  private async tick(): Promise<void> {
    if (!this.running) return;
    try {
      const pending = await this.client.pendingFor(this.voterId);
      const key = pending.map((p) => p.electionId).join("|");
      if (key !== this.lastKey) {
        this.lastKey = key;
        this.opts.onChange(pending);
      }
    } catch (err) {
      this.opts.onError?.(err);
    }
    if (this.running) {
      this.timer = setTimeout(() => void this.tick(), this.intervalMs);
    }
  }
}
