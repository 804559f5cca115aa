/** Live session: connect with retry/backoff, feed messages into the pure
 * view state, queue taps briefly while disconnected, track tap-to-window
 * round-trip latency as an overlay (not part of the replayable state). */

import { padEventToWire, parseServerLine, type PadEvent, type ServerMessage } from "./protocol.js";
import { initialView, render, type LiveView } from "./state.js";
import type { Transport, TransportFactory } from "./transport.js";

export interface SessionOptions {
  /** initial reconnect delay; doubles per attempt up to maxBackoffMs */
  backoffMs?: number;
  maxBackoffMs?: number;
  /** taps queued while disconnected are dropped after this long */
  queueTtlMs?: number;
  now?: () => number;
}

export interface SessionEvents {
  onView?: (view: LiveView) => void;
  onMessage?: (message: ServerMessage) => void;
  onStatus?: (status: "connecting" | "connected" | "retrying" | "closed") => void;
  onNotice?: (notice: string) => void;
  onLatency?: (ms: number) => void;
}

interface QueuedTap {
  line: string;
  queuedAt: number;
}

export class Session {
  view: LiveView = initialView();
  latencyMs: number | null = null;

  private transport: Transport | null = null;
  private queue: QueuedTap[] = [];
  private closed = false;
  private attempts = 0;
  private lastTapAt: number | null = null;
  private readonly now: () => number;
  private readonly backoffMs: number;
  private readonly maxBackoffMs: number;
  private readonly queueTtlMs: number;

  constructor(
    private readonly factory: TransportFactory,
    private readonly events: SessionEvents = {},
    options: SessionOptions = {},
  ) {
    this.backoffMs = options.backoffMs ?? 250;
    this.maxBackoffMs = options.maxBackoffMs ?? 4000;
    this.queueTtlMs = options.queueTtlMs ?? 1000;
    this.now = options.now ?? (() => Date.now());
  }

  get connected(): boolean {
    return this.transport !== null;
  }

  async connect(): Promise<void> {
    this.events.onStatus?.("connecting");
    while (!this.closed) {
      try {
        const transport = await this.factory();
        this.transport = transport;
        this.attempts = 0;
        transport.onLine((line) => this.handleLine(line));
        transport.onClose(() => this.handleDrop());
        this.events.onStatus?.("connected");
        this.flushQueue();
        return;
      } catch {
        this.attempts += 1;
        const delay = Math.min(this.backoffMs * 2 ** (this.attempts - 1), this.maxBackoffMs);
        this.events.onStatus?.("retrying");
        await sleep(delay);
      }
    }
  }

  /** Send a tap; while disconnected it is queued for up to queueTtlMs. */
  sendTap(ev: PadEvent): void {
    const line = padEventToWire(ev);
    this.lastTapAt = this.now();
    if (this.transport) {
      this.transport.send(line);
    } else {
      this.queue.push({ line, queuedAt: this.now() });
    }
  }

  sendRaw(obj: object): void {
    const line = JSON.stringify(obj);
    if (this.transport) this.transport.send(line);
    else this.queue.push({ line, queuedAt: this.now() });
  }

  close(): void {
    this.closed = true;
    this.transport?.close();
    this.transport = null;
    this.events.onStatus?.("closed");
  }

  private handleLine(line: string): void {
    const message = parseServerLine(line);
    if (message === null) {
      this.events.onNotice?.(`unparseable line: ${line.slice(0, 80)}`);
      return;
    }
    if (message.kind === "window" && this.lastTapAt !== null) {
      this.latencyMs = this.now() - this.lastTapAt;
      this.lastTapAt = null;
      this.events.onLatency?.(this.latencyMs);
    }
    this.view = render(this.view, message);
    this.events.onMessage?.(message);
    this.events.onView?.(this.view);
  }

  private handleDrop(): void {
    if (this.closed) return;
    this.transport = null;
    this.view = { ...this.view, connection: "disconnected" };
    this.events.onView?.(this.view);
    void this.connect();
  }

  private flushQueue(): void {
    const cutoff = this.now() - this.queueTtlMs;
    const fresh = this.queue.filter((q) => q.queuedAt >= cutoff);
    const dropped = this.queue.length - fresh.length;
    if (dropped > 0) {
      this.events.onNotice?.(`${dropped} queued tap(s) dropped after ${this.queueTtlMs} ms offline`);
    }
    this.queue = [];
    for (const q of fresh) {
      this.transport?.send(q.line);
    }
  }
}

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}
