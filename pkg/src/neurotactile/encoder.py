"""Voltage-to-pulse spike coding with inverting amplitude scaling.

The MCU timer law maps input voltage to a pulse period,
period_ms = 512 - 0.412 * (1024 * V / 5), so frequency rises with voltage.
Below the detection limit the channel sleeps and emits nothing; the
oscillator phase resets, which is what makes the whole system event driven.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import IO, Sequence

import numpy as np

from .errors import ConfigurationError, DomainError

TIMER_BASE_MS = 512.0
TIMER_STEP_MS = 0.412
ADC_LEVELS = 1024
FULL_SCALE_V = 5.0


def period_ms(v_in: float, quantize_adc: bool = False) -> float:
    """Pulse period for an input voltage per the timer law.

    `quantize_adc` floors the 10-bit conversion to an integer level, mirroring
    the MCU; the default keeps it real-valued for smooth testing.
    """
    if not 0.0 <= v_in <= FULL_SCALE_V:
        raise DomainError(f"input voltage {v_in} outside [0, {FULL_SCALE_V}] V")
    level = ADC_LEVELS * v_in / FULL_SCALE_V
    if quantize_adc:
        level = math.floor(level)
    p = TIMER_BASE_MS - TIMER_STEP_MS * level
    if p <= 0:
        raise DomainError(f"voltage {v_in} V leaves no positive pulse period")
    return p


def frequency_hz(v_in: float, quantize_adc: bool = False) -> float:
    return 1000.0 / period_ms(v_in, quantize_adc)


def voltage_for_frequency(f_hz: float) -> float:
    """Inverse of the timer law: voltage that yields pulse frequency `f_hz`."""
    if f_hz <= 1000.0 / TIMER_BASE_MS:
        raise DomainError(f"frequency {f_hz} Hz below the zero-voltage floor")
    v = (TIMER_BASE_MS - 1000.0 / f_hz) / (TIMER_STEP_MS * ADC_LEVELS / FULL_SCALE_V)
    if v > FULL_SCALE_V:
        raise DomainError(f"frequency {f_hz} Hz beyond the full-scale ceiling")
    return v


MIN_PERIOD_MS = TIMER_BASE_MS - TIMER_STEP_MS * ADC_LEVELS  # 90.112 ms at full scale


@dataclass(frozen=True)
class EncoderConfig:
    """Spike coding unit settings.

    v_detect is the detection limit: channels below it emit nothing (sleep).
    The op-amp scales the logic-high pulse by -r_feedback/r_input, giving the
    negative gate pulses the transistor needs.
    """

    v_detect: float = 1.0
    pulse_width_ms: float = 10.0
    r_feedback_ohm: float = 8_000.0
    r_input_ohm: float = 20_000.0
    v_high: float = 5.0
    f_max_hw_hz: float = 250_000.0
    quantize_adc: bool = False

    def __post_init__(self):
        if not 0.0 <= self.v_detect < self.v_high:
            raise ConfigurationError("detection limit must satisfy 0 <= v_detect < v_high")
        if self.r_feedback_ohm <= 0 or self.r_input_ohm <= 0:
            raise ConfigurationError("amplifier resistances must be positive")
        if self.f_max_hw_hz <= 0:
            raise ConfigurationError("hardware pulse-rate ceiling must be positive")
        if not 0.0 < self.pulse_width_ms < self.min_period_ms():
            raise ConfigurationError(
                f"pulse width must be in (0, {self.min_period_ms()}) ms"
            )

    def min_period_ms(self) -> float:
        """Shortest period the channel can emit (full-scale input, hw ceiling applied)."""
        return max(MIN_PERIOD_MS, 1000.0 / self.f_max_hw_hz)


def scale_amplitude(v_pulse: float, cfg: EncoderConfig | None = None) -> float:
    """Inverting-amplifier output: -(Rf/R) * v_pulse."""
    cfg = cfg or EncoderConfig()
    return -(cfg.r_feedback_ohm / cfg.r_input_ohm) * v_pulse


@dataclass(frozen=True)
class Pulse:
    t_ms: float
    amplitude_v: float
    width_ms: float

    def __post_init__(self):
        if self.width_ms <= 0:
            raise DomainError("pulse width must be positive")


@dataclass(frozen=True)
class PulseTrain:
    channel: int
    pulses: tuple[Pulse, ...]

    def __post_init__(self):
        prev_end = -math.inf
        for p in self.pulses:
            if p.t_ms < prev_end:
                raise DomainError("pulses must be ordered and non-overlapping")
            prev_end = p.t_ms + p.width_ms

    def __len__(self) -> int:
        return len(self.pulses)


class ChannelOscillator:
    """Event-driven oscillator for one channel.

    While the input sits at or above the detection limit a pulse fires every
    period_ms(current sample); the period is re-read at each emission
    (zero-order hold, like a timer reloaded per interrupt). Any sample below
    the limit resets the phase, so the first in-range sample fires immediately,
    except that a wake can never fire while the previous pulse is still high
    (pulses on a channel must not overlap).
    """

    def __init__(self, cfg: EncoderConfig, channel: int = 0):
        self.cfg = cfg
        self.channel = channel
        self.due_ms: float | None = None
        self._last_end_ms = -math.inf  # end of the previous pulse
        self._amp = scale_amplitude(cfg.v_high, cfg)

    def feed(self, samples: np.ndarray, t0_ms: float, tick_ms: float) -> list[Pulse]:
        """Consume equally spaced samples starting at t0_ms; return emitted pulses.

        Equivalent to stepping tick by tick (sleep on any sample below the
        limit, emit while the due time falls inside the current tick), but
        walks whole awake runs so cost scales with pulses, not ticks.
        """
        if tick_ms <= 0:
            raise DomainError("tick must be positive")
        if tick_ms >= self.cfg.min_period_ms():
            raise ConfigurationError(
                f"tick {tick_ms} ms coarser than the minimum pulse period"
            )
        cfg = self.cfg
        v = np.asarray(samples, dtype=float)
        if v.size == 0:
            return []
        if np.any(v < 0.0) or np.any(v > FULL_SCALE_V):
            raise DomainError(f"input voltage outside [0, {FULL_SCALE_V}] V")
        floor_period = 1000.0 / cfg.f_max_hw_hz
        awake = v >= cfg.v_detect
        out: list[Pulse] = []
        pos, n = 0, v.size
        while pos < n:
            if not awake[pos]:
                self.due_ms = None  # sleep mode, phase resets
                rel = np.argmax(awake[pos:])
                if not awake[pos + rel]:
                    break  # asleep through end of chunk
                pos += int(rel)
                continue
            rel = np.argmax(~awake[pos:])
            end_run = pos + int(rel) if not awake[pos + rel] else n
            run_end_t = t0_ms + end_run * tick_ms
            if self.due_ms is None:
                # wake: fire now, but never while the previous pulse is high
                self.due_ms = max(t0_ms + pos * tick_ms, self._last_end_ms)
            while self.due_ms < run_end_t:
                i = min(max(int((self.due_ms - t0_ms) // tick_ms), pos), end_run - 1)
                out.append(Pulse(t_ms=self.due_ms, amplitude_v=self._amp,
                                 width_ms=cfg.pulse_width_ms))
                self._last_end_ms = self.due_ms + cfg.pulse_width_ms
                self.due_ms += max(period_ms(float(v[i]), cfg.quantize_adc), floor_period)
            pos = end_run
        return out


def encode_trace(
    voltages: np.ndarray | Sequence[Sequence[float]],
    cfg: EncoderConfig | None = None,
    tick_ms: float = 1.0,
) -> list[PulseTrain]:
    """Encode an (n_ticks, n_channels) voltage trace into one PulseTrain per channel."""
    cfg = cfg or EncoderConfig()
    v = np.asarray(voltages, dtype=float)
    if v.ndim == 1:
        v = v[:, None]
    trains = []
    for ch in range(v.shape[1]):
        osc = ChannelOscillator(cfg, channel=ch)
        pulses = osc.feed(v[:, ch], t0_ms=0.0, tick_ms=tick_ms)
        trains.append(PulseTrain(channel=ch, pulses=tuple(pulses)))
    return trains


def write_pulses_jsonl(trains: Sequence[PulseTrain], dest: IO[str]) -> None:
    """One pulse per line: channel, t_ms, amplitude, width_ms."""
    for train in trains:
        for p in train.pulses:
            dest.write(json.dumps({
                "channel": train.channel,
                "t_ms": p.t_ms,
                "amplitude": p.amplitude_v,
                "width_ms": p.width_ms,
            }) + "\n")
