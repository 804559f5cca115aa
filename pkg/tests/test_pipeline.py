from dataclasses import replace

import numpy as np
import pytest

from neurotactile.errors import ConfigurationError, FormatError
from neurotactile.pipeline import (
    ConstantVoltage,
    FrameTrace,
    MorseTimings,
    PipelineEngine,
    PressEvent,
    PressProgram,
    ScenarioConfig,
    build_morse_program,
    build_ramp_trace,
    run_scenario,
)
from neurotactile.sensor import PressureFrame

CFG = ScenarioConfig()


def press(cell, kpa, start, duration):
    return (PressEvent(start, cell, "press", kpa), PressEvent(start + duration, cell, "release"))


class TestScheduling:
    def test_thirty_frames_per_window(self):
        engine = PipelineEngine(CFG)
        engine.advance(400.0)
        assert engine.units_encoded == 30
        engine.advance(1200.0)
        assert engine.units_encoded == 90

    def test_sample_ticks_exact_over_groups(self):
        engine = PipelineEngine(CFG)
        ticks = [engine._sample_tick(k) for k in range(9)]
        assert ticks == [0, 13, 26, 40, 53, 66, 80, 93, 106]

    def test_tick_must_divide_sample_group(self):
        with pytest.raises(ConfigurationError):
            ScenarioConfig(tick_ms=3.0)  # 40 ms group is not a multiple of 3

    def test_sample_cadence_tied_to_wire_rate(self):
        from neurotactile.quantizer import ThresholdBank

        mismatched = replace(CFG, quantizer=ThresholdBank(sample_period_ms=10.0))
        with pytest.raises(ConfigurationError):
            PipelineEngine(mismatched)
        # changing baud moves the required cadence with it
        from neurotactile.wire import CodecConfig

        faster = replace(CFG, codec=CodecConfig(baud=4800),
                         quantizer=ThresholdBank(sample_period_ms=32000.0 / 4800.0))
        engine = PipelineEngine(faster)
        engine.advance(400.0)
        assert engine.units_encoded == 60

    def test_window_timestamps(self):
        report = run_scenario(CFG.with_stimulus(ConstantVoltage(4.0, 1200.0)))
        assert [w.t_start_ms for w in report.windows] == [0.0, 400.0, 800.0]


class TestSleepMode:
    def test_zero_pressure_is_silent(self):
        program = PressProgram(events=(), duration_ms=5000.0)
        report = run_scenario(CFG.with_stimulus(program))
        assert report.efficiency.pulses == 0
        assert all(not w.active for w in report.windows)
        assert report.letters == []
        assert report.efficiency.reduction_ratio == 1.0

    def test_units_conserved(self):
        report = run_scenario(CFG.with_stimulus(ConstantVoltage(4.5, 2000.0)))
        assert report.units_encoded == report.units_decoded
        assert report.units_encoded >= len(report.windows) * 30


class TestSegmentsEndToEnd:
    def test_three_short_presses_three_segments(self):
        events = sum((press(4, 60.0, t, 500.0) for t in (0.0, 1600.0, 3200.0)), ())
        program = PressProgram(events=events, duration_ms=5200.0)
        report = run_scenario(CFG.with_stimulus(program))
        segments = [s for grp in report.letter_groups for s in grp]
        assert len(segments) == 3

    def test_morse_n_decodes(self):
        program = build_morse_program("-.")
        report = run_scenario(CFG.with_stimulus(program))
        assert report.decoded_text == "N"

    def test_all_five_letters(self):
        for code, letter in [("-.", "N"), ("..", "I"), ("--", "M"), ("-", "T"), (".", "E")]:
            report = run_scenario(CFG.with_stimulus(build_morse_program(code)))
            assert report.decoded_text == letter, code

    def test_long_hold_routes_to_continuous(self):
        events = press(4, 60.0, 0.0, 4000.0)
        program = PressProgram(events=events, duration_ms=6000.0)
        report = run_scenario(CFG.with_stimulus(program))
        assert len(report.letters) == 1
        assert report.letters[0]["letter"] is None
        assert report.letters[0].get("continuous")


class TestDeterminism:
    def test_morse_run_byte_identical(self):
        rng1 = np.random.default_rng(17)
        rng2 = np.random.default_rng(17)
        tm = MorseTimings(time_jitter=0.15, pressure_jitter=0.10)
        r1 = run_scenario(CFG.with_stimulus(build_morse_program("-.", tm, rng1)))
        r2 = run_scenario(CFG.with_stimulus(build_morse_program("-.", tm, rng2)))
        assert r1.to_json() == r2.to_json()

    def test_ramp_run_byte_identical(self):
        trace = FrameTrace(tuple(build_ramp_trace(rise_ms=1200, hold_ms=400, fall_ms=1200)))
        r1 = run_scenario(CFG.with_stimulus(trace))
        r2 = run_scenario(CFG.with_stimulus(trace))
        assert r1.to_json() == r2.to_json()


class TestEfficiency:
    def test_saturated_rate(self):
        report = run_scenario(CFG.with_stimulus(ConstantVoltage(4.99, 4000.0)))
        eff = report.efficiency
        assert eff.units_transmitted == len([w for w in report.windows if w.active]) * 30
        assert eff.bits_transmitted == eff.units_transmitted * 32
        # all windows active: 2400 bits/s against 108000 baseline
        assert eff.reduction_ratio == pytest.approx(1 - 2400 / 108000, abs=1e-3)

    def test_bits_are_units_times_32(self):
        report = run_scenario(CFG.with_stimulus(build_morse_program(".")))
        assert report.efficiency.bits_transmitted == report.efficiency.units_transmitted * 32

    def test_low_duty_session(self):
        program = build_morse_program("-.")
        program = PressProgram(events=program.events, duration_ms=60_000.0)
        report = run_scenario(CFG.with_stimulus(program))
        active = sum(1 for w in report.windows if w.active)
        assert active / len(report.windows) <= 0.10
        assert report.efficiency.reduction_ratio >= 0.90

    def test_proxy_note_present(self):
        report = run_scenario(CFG.with_stimulus(PressProgram((), 1000.0)))
        assert "not an electrical power" in report.efficiency.note


class TestStimuli:
    def test_frame_trace_runs(self):
        frames = (PressureFrame(0.0, (0.0,) * 9), PressureFrame(500.0, (0.0,) * 9))
        report = run_scenario(CFG.with_stimulus(FrameTrace(frames)))
        assert report.duration_ms == 500.0

    def test_missing_stimulus(self):
        with pytest.raises(ConfigurationError):
            run_scenario(CFG)

    def test_press_event_validation(self):
        with pytest.raises(FormatError):
            PressEvent(0.0, 9, "press", 10.0)
        with pytest.raises(FormatError):
            PressEvent(0.0, 0, "tap", 10.0)

    def test_morse_program_rejects_junk(self):
        with pytest.raises(FormatError):
            build_morse_program("-x")


class TestEngineStreamingEquivalence:
    def test_chunked_advance_matches_single(self):
        program = build_morse_program("-.")
        r_batch = run_scenario(CFG.with_stimulus(program))

        engine = PipelineEngine(CFG)
        events = []
        times = sorted({e.t_ms for e in program.events}) + [program.duration_ms]
        # drive with extra fine-grained advances interleaved
        cursor = 0.0
        pending = sorted(program.events, key=lambda e: e.t_ms)
        for target in times:
            while cursor < target:
                cursor = min(cursor + 37.0, target)
                events.extend(engine.advance(cursor))
            for ev in [e for e in pending if e.t_ms == target]:
                engine.set_cell_pressure(ev.cell, ev.pressure_kpa if ev.kind == "press" else 0.0)
        events.extend(engine.finish())
        letters = [e for e in events if e["kind"] == "morse"]
        assert len(letters) == 1 and letters[0]["letter"] == "N"
        assert [w.to_dict() for w in engine.reports] == [w.to_dict() for w in r_batch.windows]


class TestSensorStageCrossValidation:
    def test_engine_voltage_matches_voltage_trace(self):
        # the engine computes the lagged divider voltage chunk by chunk with a
        # closed form; it must agree with the batch voltage_trace scan
        from neurotactile.sensor import PressureFrame, voltage_trace

        grid_a = tuple([0.0] * 9)
        grid_b = tuple([30.0 if i == 4 else 5.0 for i in range(9)])
        frames = [
            PressureFrame(0.0, grid_a),
            PressureFrame(250.0, grid_b),
            PressureFrame(900.0, grid_a),
            PressureFrame(1400.0, grid_a),
        ]
        batch = voltage_trace(frames, CFG.sensor, tick_ms=1.0)

        cfg = replace(CFG, store_traces=True)
        report = run_scenario(cfg.with_stimulus(FrameTrace(tuple(frames))))
        engine_volts = report.traces["volts"]
        n = min(len(batch), len(engine_volts))
        assert np.allclose(engine_volts[:n], batch[:n], atol=1e-9)


class TestRampTrace:
    def test_profile_and_monotone_rise(self):
        frames = build_ramp_trace(rise_ms=1000, hold_ms=400, fall_ms=1000)
        center = [f.grid_kpa[4] for f in frames]
        corner = [f.grid_kpa[0] for f in frames]
        assert max(center) > max(corner) > 0
        rise = center[:10]
        assert all(b >= a for a, b in zip(rise, rise[1:]))

    def test_trace_validates(self):
        for f in build_ramp_trace():
            assert len(f.grid_kpa) == 9
