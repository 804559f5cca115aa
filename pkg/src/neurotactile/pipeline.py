"""End-to-end pipeline: sensor -> encoder -> synapse -> quantizer -> wire ->
analyzer -> recognizers, on a deterministic discrete clock.

PipelineEngine is a streaming core: pressures (or raw voltages) change at
event times and advance() simulates up to a target time, emitting window,
segment, letter, and symbol events. Batch runs and the live stream server
both drive this one engine, so there is a single implementation of the
pipeline math. The quantizer and codec fire every 32 bit-times of the serial
link (13.33 ms at 2400 baud); sample ticks come from exact fraction
arithmetic so 3 samples always span 40 ms and 30 always span one 400 ms
window.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import mlp as mlp_mod
from .analyzer import (
    SegmentClass,
    SegmentTracker,
    Segment,
    WindowReport,
    classify_segment,
    window_reduce,
)
from .encoder import ChannelOscillator, EncoderConfig, Pulse
from .errors import (
    ConfigurationError,
    FormatError,
    RoutingError,
    SimulationError,
)
from .morse import DEFAULT_MORSE_TABLE, decode_morse
from .quantizer import N_CELLS, CodeFrame, ThresholdBank, quantize
from .sensor import (
    PressureFrame,
    SensorConfig,
    read_pressure_csv,
    volts_from_pressure,
)
from .symbols import CLASS_NAMES, featurize
from .synapse import SynapseParams, drain_current
from .wire import CodecConfig, from_wire, to_wire, pack, unpack, window_size


@dataclass(frozen=True)
class PressEvent:
    t_ms: float
    cell: int
    kind: str  # "press" | "release"
    pressure_kpa: float = 0.0

    def __post_init__(self):
        if self.kind not in ("press", "release"):
            raise FormatError(f"unknown press event kind {self.kind!r}")
        if not 0 <= self.cell < N_CELLS:
            raise FormatError(f"cell {self.cell} out of range")
        if self.t_ms < 0 or self.pressure_kpa < 0:
            raise FormatError("event time and pressure must be non-negative")


@dataclass(frozen=True)
class PressProgram:
    events: tuple[PressEvent, ...]
    duration_ms: float


@dataclass(frozen=True)
class CsvTrace:
    path: str


@dataclass(frozen=True)
class FrameTrace:
    """In-memory pressure trace (same semantics as a CSV trace)."""

    frames: tuple[PressureFrame, ...]


@dataclass(frozen=True)
class ConstantVoltage:
    """Drives the spike coder directly, bypassing the sensor stage."""

    volts: float
    duration_ms: float
    channels: tuple[int, ...] = (4,)


Stimulus = PressProgram | CsvTrace | FrameTrace | ConstantVoltage


@dataclass(frozen=True)
class AnalyzerConfig:
    gap_windows: int = 1
    letter_gap_windows: int = 3


@dataclass(frozen=True)
class ScenarioConfig:
    tick_ms: float = 1.0
    seed: int = 0
    sensor: SensorConfig = field(default_factory=SensorConfig)
    encoder: EncoderConfig = field(default_factory=EncoderConfig)
    synapse: SynapseParams = field(default_factory=SynapseParams)
    quantizer: ThresholdBank = field(default_factory=ThresholdBank)
    codec: CodecConfig = field(default_factory=CodecConfig)
    analyzer: AnalyzerConfig = field(default_factory=AnalyzerConfig)
    stimulus: Stimulus | None = None
    store_traces: bool = False

    def __post_init__(self):
        if self.tick_ms <= 0:
            raise ConfigurationError("tick must be positive")
        # 3 serial units must span a whole number of ticks so the 75 Hz
        # cadence stays exact over every 40 ms group.
        group = Fraction(3 * 32000, self.codec.baud)
        tick = Fraction(str(self.tick_ms))
        if group % tick != 0:
            raise ConfigurationError(
                f"tick {self.tick_ms} ms does not divide the 3-sample group ({group} ms)"
            )

    def with_stimulus(self, stimulus: Stimulus) -> "ScenarioConfig":
        return replace(self, stimulus=stimulus)


@dataclass
class EfficiencyReport:
    """Data-volume proxy for the event-driven saving.

    This counts transmitted serial bits against a conventional
    9-channel x 12-bit x 1 kHz acquisition baseline. It is explicitly a
    data-volume proxy, not an electrical power measurement.
    """

    pulses: int
    units_transmitted: int
    bits_transmitted: int
    baseline_bits: int
    reduction_ratio: float
    note: str = "data-volume proxy; not an electrical power measurement"

    def to_dict(self) -> dict:
        return {
            "pulses": self.pulses,
            "units_transmitted": self.units_transmitted,
            "bits_transmitted": self.bits_transmitted,
            "baseline_bits": self.baseline_bits,
            "reduction_ratio": self.reduction_ratio,
            "note": self.note,
        }


BASELINE_BITS_PER_MS = 9 * 12  # 9 channels, 12-bit ADC, 1 kHz


@dataclass
class RunReport:
    duration_ms: float
    windows: list[WindowReport]
    letter_groups: list[list[Segment]]
    letters: list[dict]
    symbols: list[dict]
    efficiency: EfficiencyReport
    units_encoded: int
    units_decoded: int
    traces: dict | None = None

    @property
    def decoded_text(self) -> str:
        return "".join(e["letter"] or "?" for e in self.letters)

    def to_json(self, indent: int | None = None) -> str:
        payload = {
            "duration_ms": self.duration_ms,
            "windows": [w.to_dict() for w in self.windows],
            "letter_groups": [[s.to_dict() for s in grp] for grp in self.letter_groups],
            "letters": self.letters,
            "symbols": self.symbols,
            "efficiency": self.efficiency.to_dict(),
            "units_encoded": self.units_encoded,
            "units_decoded": self.units_decoded,
        }
        return json.dumps(payload, sort_keys=True, indent=indent)


class PipelineEngine:
    """Streaming pipeline over a fixed tick grid.

    Owns all per-channel state (lag filter, oscillator phase, synapse weight,
    sample schedule, window buffer, segmentation). A single consumer drives
    it; distinct engines never share state, so sessions can run in parallel.
    """

    def __init__(self, cfg: ScenarioConfig, model: mlp_mod.MlpModel | None = None):
        self.cfg = cfg
        self.model = model
        self.tick_ms = cfg.tick_ms
        self.frames_per_window = window_size(cfg.codec.window_ms, cfg.codec.baud)
        if self.frames_per_window < 1:
            raise ConfigurationError("window shorter than one serial unit")
        self._sample_period = Fraction(32000, cfg.codec.baud)
        # one code frame per serial unit, by construction
        if abs(cfg.quantizer.sample_period_ms - float(self._sample_period)) > 1e-9:
            raise ConfigurationError(
                f"quantizer sample period {cfg.quantizer.sample_period_ms} ms must equal "
                f"the serial unit period {float(self._sample_period):.6f} ms"
            )
        self._tick_fr = Fraction(str(cfg.tick_ms))

        self.t_tick = 0
        self.grid_kpa = np.zeros(N_CELLS)
        self.grid_volts: np.ndarray | None = None  # voltage-stimulus mode
        self._lag_y = np.zeros(N_CELLS)
        self._oscillators = [ChannelOscillator(cfg.encoder, ch) for ch in range(N_CELLS)]
        # carried gate pulse per channel: (amplitude, end tick) while a pulse
        # is still high at a chunk boundary
        self._gate_tail: list[tuple[float, int] | None] = [None] * N_CELLS
        self._w = np.zeros(N_CELLS)
        self._sample_k = 0
        self._frame_buffer: list[CodeFrame] = []
        self.window_idx = 0
        self.reports: list[WindowReport] = []
        self._tracker = SegmentTracker(cfg.analyzer.gap_windows, cfg.analyzer.letter_gap_windows)
        self.pulse_count = 0
        self.units_encoded = 0
        self.units_decoded = 0
        self.active_windows = 0
        self._tail_nonzero_units = 0
        self._finished = False
        self.traces: dict[str, list] | None = (
            {"volts": [], "gate": [], "drain": [], "frames": [], "pulses": []}
            if cfg.store_traces else None
        )

        syn = cfg.synapse
        self._decay = math.exp(-cfg.tick_ms / syn.tau_ms)
        self._gain_coeff = syn.eta * cfg.tick_ms / (syn.d_ref_ms * syn.a_ref_v)
        # per-tick gain factor <= 1 keeps w inside [0, w_max] without clamping
        self._needs_clip = self._gain_coeff * abs(cfg.encoder.v_high *
                                                  cfg.encoder.r_feedback_ohm /
                                                  cfg.encoder.r_input_ohm) > 1.0

    # -- stimulus control -------------------------------------------------

    def set_cell_pressure(self, cell: int, pressure_kpa: float) -> None:
        if not 0 <= cell < N_CELLS:
            raise FormatError(f"cell {cell} out of range")
        self.grid_volts = None
        self.grid_kpa[cell] = pressure_kpa

    def set_grid(self, grid_kpa: Sequence[float]) -> None:
        grid = np.asarray(grid_kpa, dtype=float)
        if grid.shape != (N_CELLS,):
            raise FormatError(f"grid needs {N_CELLS} pressures")
        self.grid_volts = None
        self.grid_kpa = grid.copy()

    def set_voltages(self, volts: Sequence[float]) -> None:
        v = np.asarray(volts, dtype=float)
        if v.shape != (N_CELLS,):
            raise FormatError(f"voltage grid needs {N_CELLS} entries")
        self.grid_volts = v.copy()

    # -- time -------------------------------------------------------------

    @property
    def now_ms(self) -> float:
        return self.t_tick * self.tick_ms

    @property
    def finished(self) -> bool:
        return self._finished

    def _sample_tick(self, k: int) -> int:
        return int(k * self._sample_period // self._tick_fr)

    def advance(self, to_t_ms: float) -> list[dict]:
        """Simulate up to (not beyond) to_t_ms; returns emitted events."""
        if self._finished:
            raise SimulationError("engine already finished")
        to_tick = int(math.floor(to_t_ms / self.tick_ms))
        if to_tick <= self.t_tick:
            return []
        n = to_tick - self.t_tick
        cfg = self.cfg
        t0_ms = self.now_ms
        events: list[dict] = []

        # sensor stage: commanded input is constant across the chunk
        try:
            if self.grid_volts is not None:
                volts = np.broadcast_to(self.grid_volts, (n, N_CELLS)).copy()
            else:
                target = self.grid_kpa
                if cfg.sensor.lag_tau_ms is None:
                    lagged = np.broadcast_to(target, (n, N_CELLS)).copy()
                    self._lag_y = target.copy()
                else:
                    a = math.exp(-self.tick_ms / cfg.sensor.lag_tau_ms)
                    powers = a ** np.arange(1, n + 1)
                    lagged = target + np.outer(powers, self._lag_y - target)
                    self._lag_y = lagged[-1].copy()
                volts = volts_from_pressure(lagged, cfg.sensor)
        except SimulationError as exc:
            exc.stage = "sensor"  # type: ignore[attr-defined]
            raise

        # spike coding stage
        try:
            new_pulses: list[list[Pulse]] = [
                osc.feed(volts[:, ch], t0_ms, self.tick_ms)
                for ch, osc in enumerate(self._oscillators)
            ]
        except SimulationError as exc:
            exc.stage = "encoder"  # type: ignore[attr-defined]
            raise
        self.pulse_count += sum(len(p) for p in new_pulses)

        # gate rasterization, including pulses carried across the boundary
        gate = np.zeros((n, N_CELLS))
        for ch in range(N_CELLS):
            tail = self._gate_tail[ch]
            if tail is not None:
                amp, end_tick = tail
                gate[: min(end_tick - self.t_tick, n), ch] = amp
                self._gate_tail[ch] = tail if end_tick > to_tick else None
            for p in new_pulses[ch]:
                i0 = math.ceil(p.t_ms / self.tick_ms)
                i1 = math.ceil((p.t_ms + p.width_ms) / self.tick_ms)
                gate[max(i0 - self.t_tick, 0): min(i1 - self.t_tick, n), ch] = p.amplitude_v
                if i1 > to_tick:
                    self._gate_tail[ch] = (p.amplitude_v, i1)

        # synapse accumulation; drain current is read at quantizer sample ticks
        sample_ticks: list[int] = []
        while True:
            tick = self._sample_tick(self._sample_k + len(sample_ticks))
            if tick >= to_tick:
                break
            sample_ticks.append(tick)
        syn = cfg.synapse
        gain = self._gain_coeff * np.abs(gate) * (gate < 0)
        w = self._w
        sampled_w = np.empty((len(sample_ticks), N_CELLS))
        next_sample = 0
        store = self.traces is not None
        w_hist = np.empty((n, N_CELLS)) if store else None
        for i in range(n):
            w = w * self._decay
            g = gain[i]
            w = w + g * (syn.w_max - w) / syn.w_max if g.any() else w
            if self._needs_clip:
                w = np.clip(w, 0.0, syn.w_max)
            if store:
                w_hist[i] = w
            if next_sample < len(sample_ticks) and sample_ticks[next_sample] - self.t_tick == i:
                sampled_w[next_sample] = w
                next_sample += 1
        self._w = w

        if store:
            self.traces["volts"].append(volts)
            self.traces["gate"].append(gate)
            self.traces["drain"].append(drain_current(w_hist, syn))
            for ch in range(N_CELLS):
                self.traces["pulses"].extend(
                    (ch, p.t_ms, p.amplitude_v, p.width_ms) for p in new_pulses[ch]
                )

        # quantizer + wire codec per sample, then window reduction
        for j, tick in enumerate(sample_ticks):
            t_sample = float((self._sample_k + j) * self._sample_period)
            try:
                frame = quantize(drain_current(sampled_w[j], syn), cfg.quantizer, t_ms=t_sample)
            except SimulationError as exc:
                exc.stage = "quantizer"  # type: ignore[attr-defined]
                raise
            try:
                payload = pack(frame.codes)
                unit = to_wire(payload)
                self.units_encoded += 1
                decoded = CodeFrame(t_ms=t_sample, codes=unpack(from_wire(unit)))
                self.units_decoded += 1
            except SimulationError as exc:
                exc.stage = "wire"  # type: ignore[attr-defined]
                raise
            if store:
                self.traces["frames"].append(decoded)
            self._frame_buffer.append(decoded)
            if len(self._frame_buffer) == self.frames_per_window:
                events.extend(self._close_window())
        self._sample_k += len(sample_ticks)

        self.t_tick = to_tick
        return events

    def _close_window(self) -> list[dict]:
        cfg = self.cfg
        try:
            report = window_reduce(
                self._frame_buffer,
                self.frames_per_window,
                window_idx=self.window_idx,
                t_start_ms=self.window_idx * cfg.codec.window_ms,
            )
        except SimulationError as exc:
            exc.stage = "analyzer"  # type: ignore[attr-defined]
            raise
        last_codes = list(self._frame_buffer[-1].codes)
        self._frame_buffer = []
        self.window_idx += 1
        self.reports.append(report)
        if report.active:
            self.active_windows += 1
        events: list[dict] = [{"kind": "window", **report.to_dict(), "codes": last_codes}]
        segment, letter = self._tracker.feed(report)
        events.extend(self._segment_events(segment, letter))
        return events

    def _segment_events(self, segment: Segment | None, letter: list[Segment] | None) -> list[dict]:
        events: list[dict] = []
        if segment is not None:
            cls = classify_segment(segment.total_count)
            events.append({"kind": "segment", **segment.to_dict(), "class": cls.value})
            if self.model is not None:
                events.append(self._recognize_symbol(segment))
        if letter:
            events.append(self._decode_letter(letter))
        return events

    def _recognize_symbol(self, segment: Segment) -> dict:
        span = self.reports[segment.start_window: segment.end_window + 1]
        features = featurize(span)
        probs = mlp_mod.forward(features, self.model)
        best = int(np.argmax(probs))
        return {
            "kind": "symbol",
            "class": CLASS_NAMES[best],
            "probs": [float(p) for p in probs],
            "segment": [segment.start_window, segment.end_window],
        }

    def _decode_letter(self, letter: list[Segment]) -> dict:
        classes = [classify_segment(s.total_count) for s in letter]
        event = {
            "kind": "morse",
            "classes": [c.value for c in classes],
            "code": "".join("." if c is SegmentClass.DOT else "-" if c is SegmentClass.DASH else "~"
                            for c in classes),
            "counts": [s.total_count for s in letter],
        }
        try:
            event["letter"] = decode_morse(classes, DEFAULT_MORSE_TABLE)
        except RoutingError:
            event["letter"] = None
            event["continuous"] = True
        return event

    def finish(self) -> list[dict]:
        """Flush open segments/letters and account the partial window tail."""
        if self._finished:
            return []
        self._finished = True
        self._tail_nonzero_units = sum(
            1 for f in self._frame_buffer if any(f.codes)
        )
        segment, letter = self._tracker.flush()
        events = self._segment_events(segment, letter)
        events.append({"kind": "efficiency", **self.efficiency().to_dict()})
        return events

    def efficiency(self) -> EfficiencyReport:
        units = self.active_windows * self.frames_per_window + self._tail_nonzero_units
        bits = units * 32
        baseline = int(BASELINE_BITS_PER_MS * self.now_ms)
        ratio = 1.0 if baseline == 0 else max(0.0, min(1.0, 1.0 - bits / baseline))
        return EfficiencyReport(
            pulses=self.pulse_count,
            units_transmitted=units,
            bits_transmitted=bits,
            baseline_bits=baseline,
            reduction_ratio=ratio,
        )


def run_scenario(cfg: ScenarioConfig, model: mlp_mod.MlpModel | None = None) -> RunReport:
    """Run a configured scenario to completion; deterministic for a fixed config."""
    if cfg.stimulus is None:
        raise ConfigurationError("scenario has no stimulus")
    engine = PipelineEngine(cfg, model)
    events: list[dict] = []
    stim = cfg.stimulus
    if isinstance(stim, ConstantVoltage):
        volts = np.zeros(N_CELLS)
        for ch in stim.channels:
            volts[ch] = stim.volts
        engine.set_voltages(volts)
        events.extend(engine.advance(stim.duration_ms))
    elif isinstance(stim, PressProgram):
        for ev in sorted(stim.events, key=lambda e: e.t_ms):
            events.extend(engine.advance(ev.t_ms))
            engine.set_cell_pressure(ev.cell, ev.pressure_kpa if ev.kind == "press" else 0.0)
        events.extend(engine.advance(stim.duration_ms))
    elif isinstance(stim, (CsvTrace, FrameTrace)):
        frames = read_pressure_csv(stim.path) if isinstance(stim, CsvTrace) else list(stim.frames)
        for frame in frames:
            events.extend(engine.advance(frame.t_ms))
            engine.set_grid(frame.grid_kpa)
        if frames:
            events.extend(engine.advance(frames[-1].t_ms))
    else:
        raise ConfigurationError(f"unknown stimulus {stim!r}")
    events.extend(engine.finish())

    letter_groups: list[list[Segment]] = []
    current: list[Segment] = []
    letters = [e for e in events if e["kind"] == "morse"]
    for e in events:
        if e["kind"] == "segment":
            current.append(Segment(
                start_window=e["start_window"], end_window=e["end_window"],
                total_count=e["total_count"], channel_counts=tuple(e["channel_counts"]),
            ))
        elif e["kind"] == "morse":
            letter_groups.append(current)
            current = []
    if current:
        letter_groups.append(current)

    traces = None
    if engine.traces is not None:
        traces = {
            "volts": np.concatenate(engine.traces["volts"]) if engine.traces["volts"] else np.zeros((0, N_CELLS)),
            "gate": np.concatenate(engine.traces["gate"]) if engine.traces["gate"] else np.zeros((0, N_CELLS)),
            "drain": np.concatenate(engine.traces["drain"]) if engine.traces["drain"] else np.zeros((0, N_CELLS)),
            "frames": engine.traces["frames"],
            "pulses": engine.traces["pulses"],
        }
    return RunReport(
        duration_ms=engine.now_ms,
        windows=engine.reports,
        letter_groups=letter_groups,
        letters=[{k: v for k, v in e.items() if k != "kind"} for e in letters],
        symbols=[{k: v for k, v in e.items() if k != "kind"} for e in events if e["kind"] == "symbol"],
        efficiency=engine.efficiency(),
        units_encoded=engine.units_encoded,
        units_decoded=engine.units_decoded,
        traces=traces,
    )


@dataclass(frozen=True)
class MorseTimings:
    """Press timings for scripted Morse taps.

    A dot press at the default pressure yields a handful of peaks, a dash
    lands in the 10..19 band, and the inter-symbol gap spans at least one
    400 ms window but never the letter gap.
    """

    dot_ms: float = 500.0
    dash_ms: float = 1900.0
    gap_ms: float = 1100.0
    tail_ms: float = 2000.0
    pressure_kpa: float = 60.0
    cell: int = 4
    time_jitter: float = 0.0
    pressure_jitter: float = 0.0


# Uneven press profile: center of the pad carries the full ramp pressure,
# edges and corners a fraction of it, like a rounded object pressed flat.
BELL_PROFILE = (0.25, 0.55, 0.25, 0.55, 1.0, 0.55, 0.25, 0.55, 0.25)


def build_ramp_trace(
    rise_ms: float = 4000.0,
    hold_ms: float = 3000.0,
    fall_ms: float = 4000.0,
    f_peak_hz: float = 8.3,
    profile: Sequence[float] = BELL_PROFILE,
    step_ms: float = 100.0,
    tail_ms: float = 800.0,
    sensor: SensorConfig | None = None,
) -> list[PressureFrame]:
    """Rising-holding-falling press whose depth ramps the center cell's pulse
    frequency linearly up to f_peak_hz (the staircase pressure map compresses
    a linear-kPa ramp into its first instants, which would hide the trend)."""
    from .encoder import TIMER_BASE_MS, voltage_for_frequency
    from .sensor import pressure_for_voltage

    sensor = sensor or SensorConfig()
    total = rise_ms + hold_ms + fall_ms
    f_floor = 1000.0 / TIMER_BASE_MS

    def level(t: float) -> float:
        if t < rise_ms:
            return t / rise_ms
        if t < rise_ms + hold_ms:
            return 1.0
        if t < total:
            return 1.0 - (t - rise_ms - hold_ms) / fall_ms
        return 0.0

    frames = []
    t = 0.0
    while t <= total + tail_ms:
        f = level(t) * f_peak_hz
        if f > f_floor * 1.05:
            p = pressure_for_voltage(voltage_for_frequency(f), sensor)
        else:
            p = 0.0
        frames.append(PressureFrame(t_ms=t, grid_kpa=tuple(
            min(p * q, sensor.curve.max_pressure_kpa) for q in profile
        )))
        t += step_ms
    return frames


def build_morse_program(
    code: str,
    timings: MorseTimings | None = None,
    rng: np.random.Generator | None = None,
) -> PressProgram:
    """Press/release schedule for a dot-dash code string such as "-.".

    Jitter draws a fresh uniform factor per press and per gap.
    """
    tm = timings or MorseTimings()
    if not code or any(c not in ".-" for c in code):
        raise FormatError(f"morse code string must be dots and dashes, got {code!r}")

    def jitter(base: float, frac: float) -> float:
        if rng is None or frac <= 0:
            return base
        return base * (1.0 + rng.uniform(-frac, frac))

    events: list[PressEvent] = []
    t = 0.0
    last_release = 0.0
    for i, sym in enumerate(code):
        duration = jitter(tm.dot_ms if sym == "." else tm.dash_ms, tm.time_jitter)
        pressure = jitter(tm.pressure_kpa, tm.pressure_jitter)
        events.append(PressEvent(t_ms=t, cell=tm.cell, kind="press", pressure_kpa=pressure))
        t += duration
        events.append(PressEvent(t_ms=t, cell=tm.cell, kind="release"))
        last_release = t
        if i < len(code) - 1:
            t += jitter(tm.gap_ms, tm.time_jitter)
    return PressProgram(events=tuple(events), duration_ms=last_release + tm.tail_ms)
