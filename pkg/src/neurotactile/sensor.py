"""Piezoresistive 3x3 sensor array model with bleeder (voltage divider) conditioning.

The pressure response is a piecewise-linear current-ratio curve; its segment
slopes are the sensitivities measured on the printed sensor. Resistance falls
as ratio rises, and the divider turns that into a voltage that grows with
pressure.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Sequence

import numpy as np

from .errors import DomainError, FormatError, RangeError

N_CELLS = 9

# Measured segment boundaries (kPa) and sensitivities (1/kPa) of the printed sensor.
DEFAULT_BREAKPOINTS_KPA = (0.0, 4.85, 36.28, 150.0)
DEFAULT_SLOPES_PER_KPA = (31.687, 11.712, 1.481)


@dataclass(frozen=True)
class SensitivityCurve:
    """Continuous piecewise-linear current-ratio-vs-pressure curve.

    `slopes_per_kpa[i]` is the sensitivity on the segment
    (breakpoints_kpa[i], breakpoints_kpa[i+1]].
    """

    breakpoints_kpa: tuple[float, ...] = DEFAULT_BREAKPOINTS_KPA
    slopes_per_kpa: tuple[float, ...] = DEFAULT_SLOPES_PER_KPA

    def __post_init__(self):
        bp, slopes = self.breakpoints_kpa, self.slopes_per_kpa
        if len(bp) < 2 or len(slopes) != len(bp) - 1:
            raise DomainError("need one slope per segment between consecutive breakpoints")
        if bp[0] != 0.0:
            raise DomainError("breakpoints must start at 0 kPa")
        if any(hi <= lo for lo, hi in zip(bp, bp[1:])):
            raise DomainError("breakpoints must be strictly increasing")
        if any(s <= 0 for s in slopes):
            raise DomainError("all sensitivities must be positive")

    @property
    def max_pressure_kpa(self) -> float:
        return self.breakpoints_kpa[-1]

    def ratio_at_breakpoints(self) -> np.ndarray:
        """Current ratio at each breakpoint, anchored at 1.0 for zero pressure."""
        widths = np.diff(np.asarray(self.breakpoints_kpa))
        return np.concatenate(([1.0], 1.0 + np.cumsum(widths * np.asarray(self.slopes_per_kpa))))


@dataclass(frozen=True)
class SensorGeometry:
    """Interdigital electrode geometry for the analytic sensitivity relation (SI units)."""

    r0_ohm: float
    h_m: float
    t_m: float
    rho_ohm_m: float
    d0_m: float
    p_pa: float

    def __post_init__(self):
        for name in ("r0_ohm", "h_m", "t_m", "rho_ohm_m", "d0_m", "p_pa"):
            if getattr(self, name) <= 0:
                raise DomainError(f"{name} must be positive")


@dataclass(frozen=True)
class DividerConfig:
    """Bleeder circuit: sensor on the high side so output voltage rises with pressure."""

    vcc_v: float = 5.0
    r_ref_ohm: float = 10_000.0
    sensor_high_side: bool = True

    def __post_init__(self):
        if self.vcc_v <= 0:
            raise DomainError("supply voltage must be positive")
        if self.r_ref_ohm <= 0:
            raise DomainError("reference resistor must be positive")


@dataclass(frozen=True)
class PressureFrame:
    """Time-stamped pressures (kPa) for the 3x3 grid, row-major."""

    t_ms: float
    grid_kpa: tuple[float, ...]

    def __post_init__(self):
        if len(self.grid_kpa) != N_CELLS:
            raise FormatError(f"pressure frame needs {N_CELLS} cells, got {len(self.grid_kpa)}")
        for p in self.grid_kpa:
            if not 0.0 <= p <= DEFAULT_BREAKPOINTS_KPA[-1]:
                raise RangeError(f"pressure {p} kPa outside model range [0, 150]")


PressureTrace = Sequence[PressureFrame]


@dataclass(frozen=True)
class SensorConfig:
    """Sensor array model: response curve, unloaded resistance, conditioning, lag.

    `lag_tau_ms` is the first-order mechanical response time constant; None
    disables it (useful in unit tests). The default 30 ms settles in ~90 ms.
    """

    r0_ohm: float = 500_000.0
    curve: SensitivityCurve = field(default_factory=SensitivityCurve)
    divider: DividerConfig = field(default_factory=DividerConfig)
    lag_tau_ms: float | None = 30.0

    def __post_init__(self):
        if self.r0_ohm <= 0:
            raise DomainError("unloaded resistance must be positive")
        if self.lag_tau_ms is not None and self.lag_tau_ms <= 0:
            raise DomainError("lag time constant must be positive or None")


def current_ratio(p_kpa: float, curve: SensitivityCurve | None = None) -> float:
    """Current ratio I/I0 at pressure `p_kpa`: 1 + integral of the segment slopes."""
    curve = curve or SensitivityCurve()
    if p_kpa < 0 or p_kpa > curve.max_pressure_kpa:
        raise RangeError(f"pressure {p_kpa} kPa outside model range [0, {curve.max_pressure_kpa}]")
    return float(np.interp(p_kpa, curve.breakpoints_kpa, curve.ratio_at_breakpoints()))


def resistance(p_kpa: float, r0_ohm: float, curve: SensitivityCurve | None = None) -> float:
    """Interelectrode resistance at pressure: R0 divided by the current ratio."""
    if r0_ohm <= 0:
        raise DomainError("unloaded resistance must be positive")
    return r0_ohm / current_ratio(p_kpa, curve)


def divider_voltage(r_sensor_ohm: float, cfg: DividerConfig | None = None) -> float:
    """Output voltage of the bleeder for a given sensor resistance."""
    cfg = cfg or DividerConfig()
    if r_sensor_ohm <= 0:
        raise DomainError("sensor resistance must be positive")
    if cfg.sensor_high_side:
        return cfg.vcc_v * cfg.r_ref_ohm / (cfg.r_ref_ohm + r_sensor_ohm)
    return cfg.vcc_v * r_sensor_ohm / (cfg.r_ref_ohm + r_sensor_ohm)


def sensitivity_analytic(g: SensorGeometry) -> float:
    """Analytic sensitivity R0*h*t/(rho*d0*P), converted from 1/Pa to 1/kPa."""
    s_per_pa = g.r0_ohm * g.h_m * g.t_m / (g.rho_ohm_m * g.d0_m * g.p_pa)
    return s_per_pa * 1000.0


def current_ratio_from_voltage(u_v: float, u0_v: float) -> float:
    """Equivalent current ratio I/I0 = U0/U for a constant-current measurement."""
    if u0_v <= 0:
        raise DomainError("reference voltage must be positive")
    if u_v <= 0:
        raise DomainError("measured voltage must be positive")
    if u_v > u0_v:
        raise DomainError("measured voltage cannot exceed the unloaded voltage")
    return u0_v / u_v


def pressure_for_voltage(v: float, cfg: SensorConfig | None = None) -> float:
    """Pressure (kPa) at which the settled divider output equals `v` volts.

    Returns 0 for voltages at or below the unloaded baseline; raises RangeError
    for voltages beyond the full-pressure output.
    """
    from scipy.optimize import brentq

    cfg = cfg or SensorConfig()
    p_max = cfg.curve.max_pressure_kpa
    lo = float(volts_from_pressure(np.array([0.0]), cfg)[0])
    hi = float(volts_from_pressure(np.array([p_max]), cfg)[0])
    if v <= lo:
        return 0.0
    if v > hi:
        raise RangeError(f"voltage {v} V beyond the full-pressure output {hi:.3f} V")
    return float(brentq(lambda p: float(volts_from_pressure(np.array([p]), cfg)[0]) - v, 0.0, p_max))


def volts_from_pressure(p_kpa: np.ndarray, cfg: SensorConfig) -> np.ndarray:
    """Vectorized pressure -> divider voltage (no lag). Validates the model range."""
    p = np.asarray(p_kpa, dtype=float)
    if np.any(p < 0) or np.any(p > cfg.curve.max_pressure_kpa):
        raise RangeError("pressure outside model range")
    ratio = np.interp(p, cfg.curve.breakpoints_kpa, cfg.curve.ratio_at_breakpoints())
    r = cfg.r0_ohm / ratio
    if cfg.divider.sensor_high_side:
        return cfg.divider.vcc_v * cfg.divider.r_ref_ohm / (cfg.divider.r_ref_ohm + r)
    return cfg.divider.vcc_v * r / (cfg.divider.r_ref_ohm + r)


def lag_filter(x: np.ndarray, tick_ms: float, tau_ms: float, y0: np.ndarray) -> np.ndarray:
    """First-order lag y[t] = y[t-1] + (1 - exp(-tick/tau)) * (x[t] - y[t-1])."""
    a = math.exp(-tick_ms / tau_ms)
    if x.shape[0] == 0:
        return x.copy()
    from scipy.signal import lfilter

    zi = (a * np.asarray(y0, dtype=float))[None, :] if x.ndim == 2 else np.array([a * y0])
    y, _ = lfilter([1.0 - a], [1.0, -a], x, axis=0, zi=zi)
    return y


def expand_trace(trace: PressureTrace, tick_ms: float) -> np.ndarray:
    """Zero-order-hold expansion of a sparse trace onto the tick grid.

    Returns an (n_ticks, 9) pressure array covering [first t, last t] inclusive.
    """
    if tick_ms <= 0:
        raise DomainError("tick must be positive")
    frames = list(trace)
    if not frames:
        return np.zeros((0, N_CELLS))
    times = [f.t_ms for f in frames]
    if any(b <= a for a, b in zip(times, times[1:])):
        raise FormatError("trace timestamps must be strictly increasing")
    t0, t_end = times[0], times[-1]
    n = int(math.floor((t_end - t0) / tick_ms)) + 1
    ticks = t0 + np.arange(n) * tick_ms
    grid = np.asarray([f.grid_kpa for f in frames], dtype=float)
    idx = np.searchsorted(times, ticks, side="right") - 1
    return grid[idx]


def voltage_trace(trace: PressureTrace, cfg: SensorConfig, tick_ms: float) -> np.ndarray:
    """Per-channel divider voltage samples, one row per tick.

    Applies the optional first-order pressure lag (initialized settled at the
    first frame), then the curve and divider. Deterministic.
    """
    p = expand_trace(trace, tick_ms)
    if p.shape[0] == 0:
        return p
    if cfg.lag_tau_ms is not None:
        p = lag_filter(p, tick_ms, cfg.lag_tau_ms, p[0])
        p = np.clip(p, 0.0, cfg.curve.max_pressure_kpa)
    return volts_from_pressure(p, cfg)


CSV_COLUMNS = ("t_ms", "p00", "p01", "p02", "p10", "p11", "p12", "p20", "p21", "p22")


def read_pressure_csv(source: str | Path | IO[str]) -> list[PressureFrame]:
    """Read a pressure trace CSV with columns t_ms, p00..p22 (kPa, row-major)."""
    if isinstance(source, (str, Path)):
        with open(source, newline="") as fh:
            return read_pressure_csv(fh)
    reader = csv.DictReader(source)
    if reader.fieldnames is None or set(CSV_COLUMNS) - set(reader.fieldnames):
        raise FormatError(f"pressure CSV must have columns {','.join(CSV_COLUMNS)}")
    frames = []
    for row in reader:
        try:
            t = float(row["t_ms"])
            grid = tuple(float(row[c]) for c in CSV_COLUMNS[1:])
        except (TypeError, ValueError) as exc:
            raise FormatError(f"bad pressure CSV row: {row}") from exc
        frames.append(PressureFrame(t_ms=t, grid_kpa=grid))
    if frames and any(b.t_ms <= a.t_ms for a, b in zip(frames, frames[1:])):
        raise FormatError("trace timestamps must be strictly increasing")
    return frames


def write_pressure_csv(frames: Iterable[PressureFrame], dest: IO[str]) -> None:
    writer = csv.writer(dest)
    writer.writerow(CSV_COLUMNS)
    for f in frames:
        writer.writerow([f.t_ms, *f.grid_kpa])
