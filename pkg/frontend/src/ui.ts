/** DOM rendering of the LiveView plus the tap pad input handling. */

import type { PadEvent } from "./protocol.js";
import { PEAK_HISTORY_LIMIT, type LiveView } from "./state.js";

const CODE_COLORS = ["#20242a", "#2e6f40", "#d8a531", "#d84531"];

export interface PadCallbacks {
  onTap(ev: PadEvent): void;
}

export class Console {
  private cells: HTMLElement[] = [];
  private bars: HTMLElement[] = [];
  private letterStrip: HTMLElement;
  private marks: HTMLElement;
  private symbolBanner: HTMLElement;
  private efficiency: HTMLElement;
  private status: HTMLElement;
  private latency: HTMLElement;
  private notices: HTMLElement;
  private slider: HTMLInputElement;
  private sliderLabel: HTMLElement;
  private pressed = new Set<number>();
  private t0 = performance.now();

  constructor(root: HTMLElement, private readonly callbacks: PadCallbacks) {
    root.innerHTML = `
      <div class="status-row"><span id="status">connecting</span>
        <span id="latency"></span><span id="efficiency"></span></div>
      <div class="main-row">
        <div id="pad" class="pad"></div>
        <div class="charts">
          <div id="bars" class="bars"></div>
          <div id="marks" class="marks"></div>
          <div id="letters" class="letters"></div>
          <div id="symbol" class="symbol"></div>
        </div>
      </div>
      <div class="controls">
        <label>pressure <input id="pressure" type="range" min="5" max="150" value="60">
        <span id="pressure-label">60 kPa</span></label>
        <span class="hint">space bar taps the center cell</span>
      </div>
      <div id="notices" class="notices"></div>`;
    const pad = root.querySelector("#pad") as HTMLElement;
    for (let cell = 0; cell < 9; cell++) {
      const el = document.createElement("button");
      el.className = "cell";
      el.dataset.cell = String(cell);
      el.addEventListener("pointerdown", () => this.press(cell));
      el.addEventListener("pointerup", () => this.release(cell));
      el.addEventListener("pointerleave", () => this.release(cell));
      pad.appendChild(el);
      this.cells.push(el);
    }
    const bars = root.querySelector("#bars") as HTMLElement;
    for (let i = 0; i < PEAK_HISTORY_LIMIT; i++) {
      const bar = document.createElement("div");
      bar.className = "bar";
      bars.appendChild(bar);
      this.bars.push(bar);
    }
    this.letterStrip = root.querySelector("#letters") as HTMLElement;
    this.marks = root.querySelector("#marks") as HTMLElement;
    this.symbolBanner = root.querySelector("#symbol") as HTMLElement;
    this.efficiency = root.querySelector("#efficiency") as HTMLElement;
    this.status = root.querySelector("#status") as HTMLElement;
    this.latency = root.querySelector("#latency") as HTMLElement;
    this.notices = root.querySelector("#notices") as HTMLElement;
    this.slider = root.querySelector("#pressure") as HTMLInputElement;
    this.sliderLabel = root.querySelector("#pressure-label") as HTMLElement;
    this.slider.addEventListener("input", () => {
      this.sliderLabel.textContent = `${this.slider.value} kPa`;
    });
    window.addEventListener("keydown", (ev) => {
      if (ev.code === "Space" && !ev.repeat) {
        ev.preventDefault();
        this.press(4);
      }
    });
    window.addEventListener("keyup", (ev) => {
      if (ev.code === "Space") {
        ev.preventDefault();
        this.release(4);
      }
    });
  }

  private clock(): number {
    return performance.now() - this.t0;
  }

  private press(cell: number): void {
    if (this.pressed.has(cell)) return; // press/release alternate per cell
    this.pressed.add(cell);
    this.cells[cell]?.classList.add("pressed");
    this.callbacks.onTap({
      cell,
      kind: "press",
      t_ms: this.clock(),
      pressure_kpa: Number(this.slider.value),
    });
  }

  private release(cell: number): void {
    if (!this.pressed.has(cell)) return;
    this.pressed.delete(cell);
    this.cells[cell]?.classList.remove("pressed");
    this.callbacks.onTap({
      cell,
      kind: "release",
      t_ms: this.clock(),
      pressure_kpa: Number(this.slider.value),
    });
  }

  setStatus(text: string): void {
    this.status.textContent = text;
    this.status.className = text === "connected" ? "ok" : "warn";
  }

  setLatency(ms: number): void {
    this.latency.textContent = `tap->window ${ms.toFixed(0)} ms`;
  }

  addNotice(text: string): void {
    const line = document.createElement("div");
    line.textContent = text;
    this.notices.prepend(line);
    while (this.notices.childElementCount > 5) {
      this.notices.lastElementChild?.remove();
    }
  }

  renderView(view: LiveView): void {
    view.grid.forEach((code, cell) => {
      const el = this.cells[cell];
      if (el) el.style.background = CODE_COLORS[code] ?? CODE_COLORS[0]!;
    });
    const history = view.peakHistory;
    this.bars.forEach((bar, i) => {
      const sample = history[history.length - this.bars.length + i];
      const pooled = sample ? sample.pooled : 0;
      bar.style.height = `${Math.min(pooled * 3, 60)}px`;
      bar.title = sample ? `window ${sample.window}: ${pooled} peaks` : "";
    });
    this.marks.textContent = view.pendingMarks.join(" ") + (view.trendActive ? " (continuous)" : "");
    this.letterStrip.textContent = view.letters.join(" ");
    this.symbolBanner.textContent = view.symbol
      ? `${view.symbol.cls}  [${view.symbol.probs.map((p) => p.toFixed(2)).join(" ")}]`
      : "";
    this.efficiency.textContent =
      view.efficiency === null ? "" : `data reduction ${(view.efficiency * 100).toFixed(1)}%`;
  }
}
