import io
import json

import pytest

from neurotactile.cli import main
from neurotactile.config import load_scenario
from neurotactile.errors import ConfigurationError


FULL_CONFIG = {
    "tick_ms": 1.0,
    "seed": 3,
    "sensor": {"r0_ohm": 500000.0, "lag_tau_ms": 30.0,
               "divider": {"vcc_v": 5.0, "r_ref_ohm": 10000.0}},
    "encoder": {"v_detect": 1.0, "pulse_width_ms": 10.0},
    "synapse": {"tau_ms": 250.0, "eta": 0.5},
    "quantizer": {"thresholds_v": [1.8, 2.4, 3.0]},
    "codec": {"baud": 2400, "window_ms": 400.0},
    "analyzer": {"gap_windows": 1, "letter_gap_windows": 3},
    "stimulus": {"kind": "press_program", "duration_ms": 2500.0, "events": [
        {"t_ms": 0.0, "cell": 4, "kind": "press", "pressure_kpa": 60.0},
        {"t_ms": 500.0, "cell": 4, "kind": "release"},
    ]},
}


class TestConfig:
    def test_full_round(self):
        cfg = load_scenario(io.StringIO(json.dumps(FULL_CONFIG)))
        assert cfg.seed == 3
        assert cfg.quantizer.thresholds_v == (1.8, 2.4, 3.0)
        assert cfg.stimulus.duration_ms == 2500.0

    def test_empty_config_is_defaults(self):
        cfg = load_scenario(io.StringIO("{}"))
        assert cfg.synapse.tau_ms == 250.0

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigurationError):
            load_scenario(io.StringIO(json.dumps({"sensors": {}})))
        with pytest.raises(ConfigurationError):
            load_scenario(io.StringIO(json.dumps({"sensor": {"r0": 1}})))

    def test_invalid_json(self):
        with pytest.raises(ConfigurationError):
            load_scenario(io.StringIO("{not json"))

    def test_csv_stimulus_needs_path(self):
        with pytest.raises(ConfigurationError):
            load_scenario(io.StringIO(json.dumps({"stimulus": {"kind": "csv"}})))


class TestCli:
    def test_simulate_and_report(self, tmp_path, capsys):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(FULL_CONFIG))
        out = tmp_path / "out"
        assert main(["simulate", "--config", str(cfg_path), "--out", str(out)]) == 0
        assert (out / "report.json").exists()
        assert (out / "windows.jsonl").exists()
        assert main(["report", "--run", str(out / "report.json")]) == 0
        text = capsys.readouterr().out
        assert "not an electrical power" in text

    def test_simulate_csv_stimulus_with_traces(self, tmp_path):
        trace = tmp_path / "trace.csv"
        rows = ["t_ms,p00,p01,p02,p10,p11,p12,p20,p21,p22"]
        rows.append("0.0," + ",".join(["0.0"] * 9))
        grid = ["0.0"] * 9
        grid[4] = "60.0"
        rows.append("100.0," + ",".join(grid))
        rows.append("700.0," + ",".join(["0.0"] * 9))
        rows.append("2000.0," + ",".join(["0.0"] * 9))
        trace.write_text("\n".join(rows) + "\n")
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({
            "store_traces": True,
            "stimulus": {"kind": "csv", "path": str(trace)},
        }))
        out = tmp_path / "out"
        assert main(["simulate", "--config", str(cfg_path), "--out", str(out)]) == 0
        assert (out / "drain.csv").read_text().startswith("t_ms,channel,amps")
        codes = (out / "codes.csv").read_text().splitlines()
        assert codes[0] == "t_ms,c0,c1,c2,c3,c4,c5,c6,c7,c8"
        assert len(codes) > 30
        pulses = (out / "pulses.jsonl").read_text().splitlines()
        assert len(pulses) > 2
        assert json.loads(pulses[0])["channel"] == 4

    def test_simulate_bad_config_exit_2(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({"bogus": 1}))
        assert main(["simulate", "--config", str(cfg_path), "--out", str(tmp_path / "o")]) == 2

    def test_missing_stimulus_exit_2(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text("{}")
        assert main(["simulate", "--config", str(cfg_path), "--out", str(tmp_path / "o")]) == 2

    def test_morse_script(self, tmp_path, capsys):
        script = tmp_path / "script.json"
        script.write_text(json.dumps(["N", {"code": ".."}]))
        assert main(["morse", "--script", str(script)]) == 0
        out = capsys.readouterr().out
        assert "-. -> N" in out
        assert ".. -> I" in out

    def test_codec_round_trip(self, tmp_path):
        codes_csv = tmp_path / "codes.csv"
        codes_csv.write_text(
            "t_ms,c0,c1,c2,c3,c4,c5,c6,c7,c8\n0.0,0,1,2,3,0,1,2,3,0\n13.3,3,3,3,3,3,3,3,3,3\n"
        )
        wire_path = tmp_path / "wire.hex"
        decoded = tmp_path / "decoded.csv"
        assert main(["codec", "encode", "--in", str(codes_csv), "--out", str(wire_path)]) == 0
        assert main(["codec", "decode", "--in", str(wire_path), "--out", str(decoded)]) == 0
        rows = decoded.read_text().strip().splitlines()
        assert rows[1].split(",")[1:] == ["0", "1", "2", "3", "0", "1", "2", "3", "0"]
        assert rows[2].split(",")[1:] == ["3"] * 9

    def test_calibrate_failure_exit_3(self, capsys):
        assert main(["calibrate", "--eta", "0.001", "--tau", "50",
                     "--thresholds", "4.0,4.5,4.9"]) == 3

    def test_calibrate_defaults_pass(self, capsys):
        assert main(["calibrate", "--eta", "0.5", "--tau", "250",
                     "--thresholds", "1.8,2.4,3.0"]) == 0
        assert "best:" in capsys.readouterr().out

    def test_symbols_workflow(self, tmp_path, capsys):
        data = tmp_path / "data.csv"
        model = tmp_path / "model.txt"
        assert main(["symbols", "gen", "--seed", "1", "--n-per-class", "6",
                     "--out", str(data)]) == 0
        assert main(["symbols", "train", "--data", str(data), "--out", str(model),
                     "--epochs", "60", "--seed", "0"]) == 0
        assert main(["symbols", "eval", "--data", str(data), "--model", str(model)]) == 0
        out = capsys.readouterr().out
        assert "accuracy" in out
