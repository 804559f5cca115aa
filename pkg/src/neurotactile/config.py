"""JSON scenario configuration for the CLI.

Every section and key is optional; omitted values fall back to the shipped
defaults. Unknown keys are rejected so typos fail loudly. The schema is
documented in docs/config.md.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import IO, Any

from .encoder import EncoderConfig
from .errors import ConfigurationError, SimulationError
from .pipeline import (
    AnalyzerConfig,
    ConstantVoltage,
    CsvTrace,
    PressEvent,
    PressProgram,
    ScenarioConfig,
    Stimulus,
)
from .quantizer import ThresholdBank
from .sensor import DividerConfig, SensitivityCurve, SensorConfig
from .synapse import SynapseParams
from .wire import CodecConfig


def _build(section: str, data: dict, cls, mapping: dict[str, str], nested=None):
    nested = nested or {}
    kwargs: dict[str, Any] = {}
    for key, value in data.items():
        if key in nested:
            kwargs[nested[key][0]] = nested[key][1](section + "." + key, value)
        elif key in mapping:
            kwargs[mapping[key]] = value
        else:
            raise ConfigurationError(f"unknown key {section}.{key}")
    try:
        return cls(**kwargs)
    except SimulationError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"bad {section} section: {exc}") from exc


def _curve(section: str, data: dict) -> SensitivityCurve:
    return _build(section, data, SensitivityCurve, {
        "breakpoints_kpa": "breakpoints_kpa", "slopes_per_kpa": "slopes_per_kpa",
    })


def _divider(section: str, data: dict) -> DividerConfig:
    return _build(section, data, DividerConfig, {
        "vcc_v": "vcc_v", "r_ref_ohm": "r_ref_ohm", "sensor_high_side": "sensor_high_side",
    })


def _sensor(section: str, data: dict) -> SensorConfig:
    return _build(section, data, SensorConfig,
                  {"r0_ohm": "r0_ohm", "lag_tau_ms": "lag_tau_ms"},
                  nested={"curve": ("curve", _curve), "divider": ("divider", _divider)})


def _encoder(section: str, data: dict) -> EncoderConfig:
    return _build(section, data, EncoderConfig, {
        "v_detect": "v_detect", "pulse_width_ms": "pulse_width_ms",
        "r_feedback_ohm": "r_feedback_ohm", "r_input_ohm": "r_input_ohm",
        "v_high": "v_high", "f_max_hw_hz": "f_max_hw_hz", "quantize_adc": "quantize_adc",
    })


def _synapse(section: str, data: dict) -> SynapseParams:
    return _build(section, data, SynapseParams, {
        "tau_ms": "tau_ms", "eta": "eta", "a_ref_v": "a_ref_v", "d_ref_ms": "d_ref_ms",
        "w_max": "w_max", "i_off_a": "i_off_a", "on_off_ratio": "on_off_ratio",
    })


def _quantizer(section: str, data: dict) -> ThresholdBank:
    data = dict(data)
    if "thresholds_v" in data:
        data["thresholds_v"] = tuple(data["thresholds_v"])
    return _build(section, data, ThresholdBank, {
        "k_iv_v_per_a": "k_iv_v_per_a", "thresholds_v": "thresholds_v",
        "sample_period_ms": "sample_period_ms",
    })


def _codec(section: str, data: dict) -> CodecConfig:
    return _build(section, data, CodecConfig, {"baud": "baud", "window_ms": "window_ms"})


def _analyzer(section: str, data: dict) -> AnalyzerConfig:
    return _build(section, data, AnalyzerConfig, {
        "gap_windows": "gap_windows", "letter_gap_windows": "letter_gap_windows",
    })


def _stimulus(section: str, data: dict) -> Stimulus:
    kind = data.get("kind")
    if kind == "csv":
        if "path" not in data:
            raise ConfigurationError("csv stimulus needs a path")
        return CsvTrace(path=data["path"])
    if kind == "press_program":
        events = tuple(
            PressEvent(
                t_ms=float(e["t_ms"]), cell=int(e["cell"]), kind=e["kind"],
                pressure_kpa=float(e.get("pressure_kpa", 0.0)),
            )
            for e in data.get("events", [])
        )
        return PressProgram(events=events, duration_ms=float(data["duration_ms"]))
    if kind == "constant_voltage":
        return ConstantVoltage(
            volts=float(data["volts"]),
            duration_ms=float(data["duration_ms"]),
            channels=tuple(data.get("channels", [4])),
        )
    raise ConfigurationError(f"unknown stimulus kind {kind!r} in {section}")


_SECTIONS = {
    "sensor": ("sensor", _sensor),
    "encoder": ("encoder", _encoder),
    "synapse": ("synapse", _synapse),
    "quantizer": ("quantizer", _quantizer),
    "codec": ("codec", _codec),
    "analyzer": ("analyzer", _analyzer),
    "stimulus": ("stimulus", _stimulus),
}


def scenario_from_dict(data: dict) -> ScenarioConfig:
    kwargs: dict[str, Any] = {}
    for key, value in data.items():
        if key in ("tick_ms", "seed", "store_traces"):
            kwargs[key] = value
        elif key in _SECTIONS:
            attr, fn = _SECTIONS[key]
            kwargs[attr] = fn(key, value)
        else:
            raise ConfigurationError(f"unknown config key {key}")
    return ScenarioConfig(**kwargs)


def load_scenario(source: str | Path | IO[str]) -> ScenarioConfig:
    if isinstance(source, (str, Path)):
        with open(source) as fh:
            return load_scenario(fh)
    try:
        data = json.load(source)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigurationError("config root must be a JSON object")
    return scenario_from_dict(data)
