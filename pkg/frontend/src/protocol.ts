/** Message types of the newline-delimited JSON stream (docs/stream-protocol.md). */

export interface HelloMessage {
  kind: "hello";
  protocol: number;
  window_ms: number;
  real_time: boolean;
}

export interface WindowMessage {
  kind: "window";
  window: number;
  t_start_ms: number;
  codes: number[];
  max: number[];
  peaks: number[];
  active: boolean;
}

export interface SegmentMessage {
  kind: "segment";
  start_window: number;
  end_window: number;
  total_count: number;
  channel_counts: number[];
  class: "dot" | "dash" | "continuous";
}

export interface MorseMessage {
  kind: "morse";
  code: string;
  classes: string[];
  counts: number[];
  letter: string | null;
  continuous?: boolean;
}

export interface SymbolMessage {
  kind: "symbol";
  class: string;
  probs: number[];
  segment: [number, number];
}

export interface EfficiencyMessage {
  kind: "efficiency";
  pulses: number;
  units_transmitted: number;
  bits_transmitted: number;
  baseline_bits: number;
  reduction_ratio: number;
  note: string;
}

export interface ErrorMessage {
  kind: "error";
  message: string;
}

export type ServerMessage =
  | HelloMessage
  | WindowMessage
  | SegmentMessage
  | MorseMessage
  | SymbolMessage
  | EfficiencyMessage
  | ErrorMessage;

export interface PadEvent {
  cell: number; // 0..8 row-major
  kind: "press" | "release";
  t_ms: number; // client clock, ms since session start
  pressure_kpa: number;
}

export function padEventToWire(ev: PadEvent): string {
  if (!Number.isInteger(ev.cell) || ev.cell < 0 || ev.cell > 8) {
    throw new Error(`cell ${ev.cell} out of range`);
  }
  const body =
    ev.kind === "press"
      ? { press: ev.cell, pressure_kpa: ev.pressure_kpa, t: ev.t_ms }
      : { release: ev.cell, t: ev.t_ms };
  return JSON.stringify(body);
}

/** Parse one line; returns null for lines that are not valid messages. */
export function parseServerLine(line: string): ServerMessage | null {
  let obj: unknown;
  try {
    obj = JSON.parse(line);
  } catch {
    return null;
  }
  if (typeof obj !== "object" || obj === null) return null;
  const kind = (obj as { kind?: unknown }).kind;
  if (typeof kind !== "string") return null;
  return obj as ServerMessage;
}
