"""Leaky saturating integrator model of the ion-gel gated synaptic transistor.

One state variable per channel: the accumulated weight w decays exponentially
and grows while a negative gate pulse is applied, scaled by pulse amplitude
and duration and saturating toward w_max. Drain current maps linearly in w
between the off current and on_off_ratio times it. This single-state form
reproduces the number/rate/amplitude/duration plasticity orderings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, DomainError
from .encoder import Pulse, PulseTrain

# Defaults are products of the calibration sweep (see calibrate module): the
# per-pulse ripple must cross at least one quantizer threshold across the
# 2.5-11 Hz operating band.
DEFAULT_TAU_MS = 250.0
DEFAULT_ETA = 0.5


@dataclass(frozen=True)
class SynapseParams:
    tau_ms: float = DEFAULT_TAU_MS
    eta: float = DEFAULT_ETA
    a_ref_v: float = 2.0
    d_ref_ms: float = 10.0
    w_max: float = 1.0
    i_off_a: float = 1e-9
    on_off_ratio: float = 1e4

    def __post_init__(self):
        if self.tau_ms <= 0:
            raise ConfigurationError("decay time constant must be positive")
        if self.eta <= 0:
            raise ConfigurationError("per-pulse gain must be positive")
        if self.w_max <= 0:
            raise ConfigurationError("saturation weight must be positive")
        if self.on_off_ratio < 1:
            raise ConfigurationError("on/off ratio must be at least 1")
        if self.i_off_a <= 0 or self.a_ref_v <= 0 or self.d_ref_ms <= 0:
            raise ConfigurationError("reference quantities must be positive")

    @property
    def i_on_a(self) -> float:
        return self.i_off_a * self.on_off_ratio


@dataclass(frozen=True)
class SynapseState:
    w: float = 0.0
    t_last_ms: float = 0.0

    def __post_init__(self):
        if self.w < 0:
            raise DomainError("weight cannot be negative")


def drain_current(w, params: SynapseParams):
    """Drain current for weight w: I_off at rest, I_off*on_off_ratio saturated."""
    return params.i_off_a * (1.0 + (params.on_off_ratio - 1.0) * w / params.w_max)


def step_weights(
    w: np.ndarray, gate_v: np.ndarray, dt_ms: float, params: SynapseParams
) -> tuple[np.ndarray, np.ndarray]:
    """Advance weights one tick; returns (new weights, drain currents).

    Decay applies first; a negative gate then adds
    eta * (|gate|/a_ref) * (dt/d_ref) * (1 - w/w_max). Weights are clamped to
    [0, w_max] so the bounds hold for any parameter choice.
    """
    if dt_ms <= 0:
        raise DomainError("time step must be positive")
    w = np.asarray(w, dtype=float) * math.exp(-dt_ms / params.tau_ms)
    gate_v = np.asarray(gate_v, dtype=float)
    gain = (
        params.eta
        * (np.abs(gate_v) / params.a_ref_v)
        * (dt_ms / params.d_ref_ms)
        * (1.0 - w / params.w_max)
    )
    w = np.where(gate_v < 0, w + gain, w)
    w = np.clip(w, 0.0, params.w_max)
    return w, drain_current(w, params)


def step(
    state: SynapseState, gate_v: float, dt_ms: float, params: SynapseParams
) -> tuple[SynapseState, float]:
    """Single-channel step: returns (new state, drain current)."""
    w, i = step_weights(np.array([state.w]), np.array([gate_v]), dt_ms, params)
    return SynapseState(w=float(w[0]), t_last_ms=state.t_last_ms + dt_ms), float(i[0])


def rasterize_gate(
    trains: Sequence[PulseTrain], n_ticks: int, tick_ms: float, n_channels: int
) -> np.ndarray:
    """Gate voltage per tick per channel; tick i carries any pulse covering
    [i*tick, (i+1)*tick) by its onset."""
    gate = np.zeros((n_ticks, n_channels))
    for train in trains:
        for p in train.pulses:
            i0 = math.ceil(p.t_ms / tick_ms)
            i1 = math.ceil((p.t_ms + p.width_ms) / tick_ms)
            if i0 < n_ticks:
                gate[i0:min(i1, n_ticks), train.channel] = p.amplitude_v
    return gate


def simulate(
    train: PulseTrain | Sequence[PulseTrain],
    params: SynapseParams,
    tick_ms: float,
    duration_ms: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Step the model over a pulse train; returns (t_ms, drain current trace).

    For a single train the trace is 1-D; for a list it is (n_ticks, n_trains).
    The tick must resolve at least half a pulse width.
    """
    single = isinstance(train, PulseTrain)
    trains = [train] if single else list(train)
    widths = [p.width_ms for tr in trains for p in tr.pulses]
    if widths and tick_ms > min(widths) / 2:
        raise ConfigurationError("tick must be at most half the pulse width")
    n = int(round(duration_ms / tick_ms))
    remap = {tr.channel: i for i, tr in enumerate(trains)}
    gate = np.zeros((n, len(trains)))
    for tr in trains:
        local = PulseTrain(channel=remap[tr.channel], pulses=tr.pulses)
        gate += rasterize_gate([local], n, tick_ms, len(trains))
    w = np.zeros(len(trains))
    out = np.empty((n, len(trains)))
    for i in range(n):
        w, out[i] = step_weights(w, gate[i], tick_ms, params)
    t = np.arange(n) * tick_ms
    return (t, out[:, 0]) if single else (t, out)


@dataclass(frozen=True)
class PeakMetrics:
    global_max: float
    local_maxima: tuple[tuple[int, float], ...]  # (sample index, value)


def peak_metrics(trace: Sequence[float] | np.ndarray) -> PeakMetrics:
    """Global maximum plus local maxima found by a strict rise-then-fall scan.

    Plateaus keep the current phase, so a rise, a flat run, then a fall counts
    as one maximum at the first plateau sample.
    """
    values = np.asarray(trace, dtype=float)
    if values.size == 0:
        raise DomainError("trace is empty")
    maxima: list[tuple[int, float]] = []
    rising = False
    peak_idx = 0
    for i in range(1, values.size):
        d = values[i] - values[i - 1]
        if d > 0:
            rising = True
            peak_idx = i
        elif d < 0:
            if rising:
                maxima.append((peak_idx, float(values[peak_idx])))
                rising = False
    return PeakMetrics(global_max=float(values.max()), local_maxima=tuple(maxima))


def uniform_train(
    n_pulses: int,
    interval_ms: float,
    amplitude_v: float = -2.0,
    width_ms: float = 10.0,
    channel: int = 0,
    start_ms: float = 0.0,
) -> PulseTrain:
    """Regular pulse train (test/characterization helper)."""
    if interval_ms <= width_ms:
        raise DomainError("pulse interval must exceed the width")
    pulses = tuple(
        Pulse(t_ms=start_ms + k * interval_ms, amplitude_v=amplitude_v, width_ms=width_ms)
        for k in range(n_pulses)
    )
    return PulseTrain(channel=channel, pulses=pulses)
