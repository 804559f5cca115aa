import { describe, expect, it, vi } from "vitest";

import type { PadEvent } from "../src/protocol.js";
import { Session } from "../src/session.js";
import type { Transport } from "../src/transport.js";

class FakeTransport implements Transport {
  sent: string[] = [];
  private lineCb: (line: string) => void = () => {};
  private closeCb: () => void = () => {};

  send(line: string): void {
    this.sent.push(line);
  }
  close(): void {}
  onLine(cb: (line: string) => void): void {
    this.lineCb = cb;
  }
  onClose(cb: () => void): void {
    this.closeCb = cb;
  }
  feed(obj: object): void {
    this.lineCb(JSON.stringify(obj));
  }
  feedRaw(line: string): void {
    this.lineCb(line);
  }
  drop(): void {
    this.closeCb();
  }
}

function tap(kind: "press" | "release", t: number): PadEvent {
  return { cell: 4, kind, t_ms: t, pressure_kpa: 60 };
}

describe("session", () => {
  it("connects and feeds messages into the view", async () => {
    const transport = new FakeTransport();
    const session = new Session(async () => transport);
    await session.connect();
    transport.feed({ kind: "hello", protocol: 1, window_ms: 400, real_time: false });
    expect(session.view.connection).toBe("connected");
    expect(session.view.protocol).toBe(1);
  });

  it("serializes taps onto the wire", async () => {
    const transport = new FakeTransport();
    const session = new Session(async () => transport);
    await session.connect();
    session.sendTap(tap("press", 12));
    session.sendTap(tap("release", 500));
    expect(JSON.parse(transport.sent[0]!)).toEqual({ press: 4, pressure_kpa: 60, t: 12 });
    expect(JSON.parse(transport.sent[1]!)).toEqual({ release: 4, t: 500 });
  });

  it("reconnects with backoff after a drop", async () => {
    const first = new FakeTransport();
    const second = new FakeTransport();
    let attempt = 0;
    const statuses: string[] = [];
    const session = new Session(
      async () => {
        attempt += 1;
        if (attempt === 1) return first;
        if (attempt === 2) throw new Error("refused");
        return second;
      },
      { onStatus: (s) => statuses.push(s) },
      { backoffMs: 5 },
    );
    await session.connect();
    first.drop();
    await vi.waitFor(() => expect(attempt).toBe(3));
    expect(session.view.connection).toBe("disconnected"); // until the next hello
    second.feed({ kind: "hello", protocol: 1, window_ms: 400, real_time: false });
    expect(session.view.connection).toBe("connected");
    expect(statuses).toContain("retrying");
  });

  it("queues taps while disconnected and drops stale ones after 1s", async () => {
    let now = 1000;
    const transport = new FakeTransport();
    let available = false;
    const notices: string[] = [];
    const session = new Session(
      async () => {
        if (!available) throw new Error("refused");
        return transport;
      },
      { onNotice: (n) => notices.push(n) },
      { backoffMs: 5, queueTtlMs: 1000, now: () => now },
    );
    const connecting = session.connect();
    session.sendTap(tap("press", 0)); // queued at t=1000
    now += 1500;
    session.sendTap(tap("release", 600)); // queued at t=2500
    available = true;
    await connecting;
    // the first tap aged out, the second was flushed
    expect(transport.sent).toHaveLength(1);
    expect(JSON.parse(transport.sent[0]!)).toEqual({ release: 4, t: 600 });
    expect(notices.some((n) => n.includes("dropped"))).toBe(true);
  });

  it("records tap-to-window latency as an overlay", async () => {
    let now = 0;
    const transport = new FakeTransport();
    const latencies: number[] = [];
    const session = new Session(
      async () => transport,
      { onLatency: (ms) => latencies.push(ms) },
      { now: () => now },
    );
    await session.connect();
    session.sendTap(tap("press", 0));
    now = 37;
    transport.feed({
      kind: "window", window: 0, t_start_ms: 0,
      codes: [0, 0, 0, 0, 1, 0, 0, 0, 0], max: [0, 0, 0, 0, 1, 0, 0, 0, 0],
      peaks: [0, 0, 0, 0, 1, 0, 0, 0, 0], active: true,
    });
    expect(latencies).toEqual([37]);
    expect(session.latencyMs).toBe(37);
  });

  it("unparseable lines produce a notice, not a crash", async () => {
    const transport = new FakeTransport();
    const notices: string[] = [];
    const session = new Session(async () => transport, { onNotice: (n) => notices.push(n) });
    await session.connect();
    transport.feedRaw("{{{not json");
    expect(notices).toHaveLength(1);
    expect(session.view.rendered).toBe(0);
  });
});
