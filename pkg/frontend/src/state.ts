/** Pure view state: a fold over the ordered server message history.
 *
 * render(view, message) never mutates its input, so recorded sessions replay
 * to identical snapshots and the UI can re-render from scratch at any time.
 */

import type { ServerMessage } from "./protocol.js";

export interface PeakSample {
  window: number;
  t_start_ms: number;
  pooled: number;
  peaks: number[];
}

export interface LiveView {
  connection: "connecting" | "connected" | "disconnected";
  protocol: number | null;
  windowMs: number;
  /** current 2-bit code per cell (last frame of the latest window) */
  grid: number[];
  /** per-cell maximum over the latest window */
  gridMax: number[];
  /** rolling per-window peak counts, newest last */
  peakHistory: PeakSample[];
  /** decoded letters; "?" marks a rejected code */
  letters: string[];
  /** dot/dash record of the letter in progress */
  pendingMarks: string[];
  trendActive: boolean;
  symbol: { cls: string; probs: number[] } | null;
  efficiency: number | null;
  lastError: string | null;
  /** highest window index rendered; guards the in-order invariant */
  lastWindow: number;
  outOfOrder: number;
  rendered: number;
}

export const PEAK_HISTORY_LIMIT = 60;

export function initialView(): LiveView {
  return {
    connection: "connecting",
    protocol: null,
    windowMs: 400,
    grid: new Array(9).fill(0),
    gridMax: new Array(9).fill(0),
    peakHistory: [],
    letters: [],
    pendingMarks: [],
    trendActive: false,
    symbol: null,
    efficiency: null,
    lastError: null,
    lastWindow: -1,
    outOfOrder: 0,
    rendered: 0,
  };
}

const MARKS: Record<string, string> = { dot: ".", dash: "-", continuous: "~" };

/** Fold one server message into the view. Unknown kinds are ignored with a
 * console note; out-of-order window messages are counted and dropped. */
export function render(view: LiveView, message: ServerMessage): LiveView {
  const next: LiveView = { ...view, rendered: view.rendered + 1 };
  switch (message.kind) {
    case "hello":
      next.connection = "connected";
      next.protocol = message.protocol;
      next.windowMs = message.window_ms;
      return next;
    case "window": {
      if (message.window <= view.lastWindow) {
        console.warn(`window ${message.window} out of order (last ${view.lastWindow})`);
        next.outOfOrder = view.outOfOrder + 1;
        next.rendered = view.rendered; // dropped, not rendered
        return next;
      }
      next.grid = [...message.codes];
      next.gridMax = [...message.max];
      next.lastWindow = message.window;
      next.peakHistory = [
        ...view.peakHistory,
        {
          window: message.window,
          t_start_ms: message.t_start_ms,
          pooled: message.peaks.reduce((a, b) => a + b, 0),
          peaks: [...message.peaks],
        },
      ].slice(-PEAK_HISTORY_LIMIT);
      return next;
    }
    case "segment":
      next.pendingMarks = [...view.pendingMarks, MARKS[message.class] ?? "?"];
      next.trendActive = message.class === "continuous";
      return next;
    case "morse":
      next.letters = [...view.letters, message.continuous ? "~" : message.letter ?? "?"];
      next.pendingMarks = [];
      next.trendActive = Boolean(message.continuous);
      return next;
    case "symbol":
      next.symbol = { cls: message.class, probs: [...message.probs] };
      return next;
    case "efficiency":
      next.efficiency = message.reduction_ratio;
      return next;
    case "error":
      next.lastError = message.message;
      return next;
    default: {
      console.warn("ignoring unknown message kind", (message as { kind?: string }).kind);
      next.rendered = view.rendered;
      return next;
    }
  }
}

/** Replay a recorded message history from scratch. */
export function replay(messages: ServerMessage[]): LiveView {
  return messages.reduce(render, initialView());
}
