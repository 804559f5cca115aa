"""Grid-search calibration of the synapse/quantizer parameters.

The objective ties the whole front end together: a constant-frequency
stimulus of f Hz held for 4 s must produce a segment whose peak count stays
within 20% of f*4, for every probe frequency. A configuration's margin is
the worst-case remaining headroom inside that band; the sweep returns the
passing configuration with the largest margin plus the full table, best
first.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

from .encoder import voltage_for_frequency
from .errors import CalibrationError, DomainError
from .pipeline import ConstantVoltage, ScenarioConfig, run_scenario

PROBE_FREQUENCIES_HZ = (2.5, 4.0, 6.0, 8.0, 11.0)
PROBE_DURATION_MS = 4000.0
COUNT_TOLERANCE = 0.20


@dataclass(frozen=True)
class CalibrationEntry:
    eta: float
    tau_ms: float
    thresholds_v: tuple[float, float, float]
    counts: tuple[int, ...]
    targets: tuple[float, ...]
    margin: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "eta": self.eta,
            "tau_ms": self.tau_ms,
            "thresholds_v": list(self.thresholds_v),
            "counts": list(self.counts),
            "targets": list(self.targets),
            "margin": self.margin,
            "passed": self.passed,
        }


def probe_counts(
    cfg: ScenarioConfig,
    frequencies_hz: Sequence[float] = PROBE_FREQUENCIES_HZ,
    duration_ms: float = PROBE_DURATION_MS,
) -> list[int]:
    """Segment peak count for each constant-frequency probe on the center cell."""
    counts = []
    for f in frequencies_hz:
        stim = ConstantVoltage(volts=voltage_for_frequency(f), duration_ms=duration_ms)
        report = run_scenario(cfg.with_stimulus(stim))
        segments = [s for grp in report.letter_groups for s in grp]
        counts.append(sum(s.total_count for s in segments))
    return counts


def evaluate(
    cfg: ScenarioConfig,
    frequencies_hz: Sequence[float] = PROBE_FREQUENCIES_HZ,
    duration_ms: float = PROBE_DURATION_MS,
    tolerance: float = COUNT_TOLERANCE,
) -> CalibrationEntry:
    counts = probe_counts(cfg, frequencies_hz, duration_ms)
    targets = tuple(f * duration_ms / 1000.0 for f in frequencies_hz)
    # relative headroom left inside the +-tolerance band, worst frequency
    margins = [
        (tolerance * t - abs(c - t)) / (tolerance * t)
        for c, t in zip(counts, targets)
    ]
    margin = min(margins)
    return CalibrationEntry(
        eta=cfg.synapse.eta,
        tau_ms=cfg.synapse.tau_ms,
        thresholds_v=cfg.quantizer.thresholds_v,
        counts=tuple(counts),
        targets=targets,
        margin=margin,
        passed=margin >= 0.0,
    )


def calibrate(
    etas: Sequence[float],
    taus_ms: Sequence[float],
    threshold_sets: Sequence[tuple[float, float, float]],
    base: ScenarioConfig | None = None,
    frequencies_hz: Sequence[float] = PROBE_FREQUENCIES_HZ,
    duration_ms: float = PROBE_DURATION_MS,
    tolerance: float = COUNT_TOLERANCE,
) -> tuple[ScenarioConfig, list[CalibrationEntry]]:
    """Sweep the grid; returns (best passing config, table sorted best first)."""
    if not etas or not taus_ms or not threshold_sets:
        raise DomainError("calibration ranges must be non-empty")
    base = base or ScenarioConfig()
    table: list[CalibrationEntry] = []
    for eta in etas:
        for tau in taus_ms:
            for thresholds in threshold_sets:
                cfg = replace(
                    base,
                    synapse=replace(base.synapse, eta=eta, tau_ms=tau),
                    quantizer=replace(base.quantizer, thresholds_v=tuple(thresholds)),
                )
                table.append(evaluate(cfg, frequencies_hz, duration_ms, tolerance))
    table.sort(key=lambda e: -e.margin)
    best = table[0]
    if not best.passed:
        raise CalibrationError(
            f"no configuration met the +-{tolerance:.0%} objective; "
            f"best was eta={best.eta} tau={best.tau_ms} thresholds={best.thresholds_v} "
            f"(margin {best.margin:.3f})",
            best_attempt=best,
        )
    best_cfg = replace(
        base,
        synapse=replace(base.synapse, eta=best.eta, tau_ms=best.tau_ms),
        quantizer=replace(base.quantizer, thresholds_v=best.thresholds_v),
    )
    return best_cfg, table
