"""Command line interface.

Exit codes: 0 success, 2 configuration/format error, 3 calibration failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .analyzer import write_reports_jsonl, write_segments_jsonl
from .calibrate import calibrate
from .config import load_scenario
from .errors import CalibrationError, ConfigurationError, FormatError, SimulationError
from .mlp import TrainConfig, accuracy, load_model, macro_recall, save_model, train
from .morse import DEFAULT_MORSE_TABLE
from .pipeline import (
    MorseTimings,
    RunReport,
    ScenarioConfig,
    build_morse_program,
    run_scenario,
)
from .quantizer import read_code_csv, write_code_csv, CodeFrame
from .server import serve_stream
from .symbols import gen_symbol_dataset, read_dataset_csv, split_dataset, write_dataset_csv
from .wire import WireUnit, from_wire, pack, to_wire, unpack

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CALIBRATION = 3


def _write_run_outputs(report: RunReport, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.json").write_text(report.to_json(indent=2) + "\n")
    with open(out_dir / "windows.jsonl", "w") as fh:
        write_reports_jsonl(report.windows, fh)
    with open(out_dir / "segments.jsonl", "w") as fh:
        write_segments_jsonl(report.letter_groups, fh)
    if report.traces is not None:
        drain = report.traces["drain"]
        with open(out_dir / "drain.csv", "w") as fh:
            fh.write("t_ms,channel,amps\n")
            for t in range(drain.shape[0]):
                for ch in range(drain.shape[1]):
                    fh.write(f"{float(t)},{ch},{drain[t, ch]!r}\n")
        with open(out_dir / "codes.csv", "w") as fh:
            write_code_csv(report.traces["frames"], fh)
        with open(out_dir / "pulses.jsonl", "w") as fh:
            for ch, t_ms, amp, width in report.traces["pulses"]:
                fh.write(json.dumps({"channel": ch, "t_ms": t_ms,
                                     "amplitude": amp, "width_ms": width}) + "\n")


def _cmd_simulate(args) -> int:
    cfg = load_scenario(args.config)
    if cfg.stimulus is None:
        raise ConfigurationError("config must include a stimulus section")
    report = run_scenario(cfg)
    _write_run_outputs(report, Path(args.out))
    print(f"simulated {report.duration_ms:.0f} ms: {len(report.windows)} windows, "
          f"{sum(len(g) for g in report.letter_groups)} segments, "
          f"letters: {report.decoded_text or '-'}")
    return EXIT_OK


def _cmd_morse(args) -> int:
    with open(args.script) as fh:
        script = json.load(fh)
    cfg = load_scenario(args.config) if args.config else ScenarioConfig()
    rng = np.random.default_rng(args.seed) if args.seed is not None else None
    letters = []
    for entry in script if isinstance(script, list) else [script]:
        if isinstance(entry, str):
            code = DEFAULT_MORSE_TABLE_INVERSE.get(entry.upper())
            if code is None:
                raise FormatError(f"letter {entry!r} not in the Morse table")
        else:
            code = entry["code"]
        program = build_morse_program(code, MorseTimings(
            time_jitter=args.time_jitter, pressure_jitter=args.pressure_jitter), rng)
        report = run_scenario(cfg.with_stimulus(program))
        decoded = report.letters[0]["letter"] if report.letters else None
        letters.append({"code": code, "decoded": decoded})
        print(f"{code} -> {decoded or 'rejected'}")
    if args.out:
        Path(args.out).write_text(json.dumps(letters, indent=2) + "\n")
    return EXIT_OK


DEFAULT_MORSE_TABLE_INVERSE = {v: k for k, v in DEFAULT_MORSE_TABLE.items()}


def _cmd_symbols(args) -> int:
    if args.action == "gen":
        ds = gen_symbol_dataset(seed=args.seed, n_per_class=args.n_per_class, noise=args.noise)
        with open(args.out, "w") as fh:
            write_dataset_csv(ds, fh)
        print(f"wrote {len(ds.samples)} samples to {args.out}")
        return EXIT_OK
    with open(args.data) as fh:
        ds = read_dataset_csv(fh)
    if args.action == "train":
        (tx, ty), (hx, hy) = split_dataset(ds, args.holdout, seed=args.seed)
        model, history = train(tx, ty, TrainConfig(epochs=args.epochs, seed=args.seed),
                               val=(hx, hy))
        save_model(model, args.out)
        last = history[-1]
        print(f"trained {args.epochs} epochs: train acc {last.train_accuracy:.3f} "
              f"recall {last.train_recall:.3f}; holdout acc {last.val_accuracy:.3f} "
              f"recall {last.val_recall:.3f}")
        return EXIT_OK
    if args.action == "eval":
        model = load_model(args.model)
        x, y = ds.arrays()
        print(f"accuracy {accuracy(model, x, y):.3f} macro recall {macro_recall(model, x, y):.3f} "
              f"on {len(y)} samples")
        return EXIT_OK
    raise ConfigurationError(f"unknown symbols action {args.action}")


def _cmd_codec(args) -> int:
    if args.action == "encode":
        with open(args.infile) as fh:
            frames = read_code_csv(fh)
        with open(args.out, "w") as fh:
            for frame in frames:
                fh.write(to_wire(pack(frame.codes)).to_hex() + "\n")
        print(f"encoded {len(frames)} frames to {args.out}")
        return EXIT_OK
    if args.action == "decode":
        with open(args.infile) as fh:
            units = [WireUnit.from_hex(line) for line in fh if line.strip()]
        frames = [CodeFrame(t_ms=float(i), codes=unpack(from_wire(u)))
                  for i, u in enumerate(units)]
        with open(args.out, "w") as fh:
            write_code_csv(frames, fh)
        print(f"decoded {len(units)} units to {args.out}")
        return EXIT_OK
    raise ConfigurationError(f"unknown codec action {args.action}")


def _cmd_calibrate(args) -> int:
    base = load_scenario(args.config) if args.config else ScenarioConfig()
    threshold_sets = [tuple(float(x) for x in t.split(",")) for t in args.thresholds]
    best, table = calibrate(args.eta, args.tau, threshold_sets, base=base)
    print(f"{'eta':>5} {'tau_ms':>7} {'thresholds':>18} {'counts':>22} {'margin':>7} pass")
    for entry in table:
        print(f"{entry.eta:>5} {entry.tau_ms:>7} {str(entry.thresholds_v):>18} "
              f"{str(entry.counts):>22} {entry.margin:>7.3f} {entry.passed}")
    print(f"best: eta={best.synapse.eta} tau_ms={best.synapse.tau_ms} "
          f"thresholds={best.quantizer.thresholds_v}")
    if args.out:
        Path(args.out).write_text(json.dumps([e.to_dict() for e in table], indent=2) + "\n")
    return EXIT_OK


def _cmd_serve(args) -> int:
    scenario = load_scenario(args.config) if args.config else ScenarioConfig()
    model = load_model(args.model) if args.model else None
    serve_stream(args.port, scenario, model, real_time=not args.accelerated)
    return EXIT_OK


def _cmd_report(args) -> int:
    data = json.loads(Path(args.run).read_text())
    eff = data.get("efficiency", {})
    print(f"duration: {data.get('duration_ms', 0):.0f} ms, "
          f"windows: {len(data.get('windows', []))}, "
          f"units encoded/decoded: {data.get('units_encoded')}/{data.get('units_decoded')}")
    letters = data.get("letters", [])
    if letters:
        print("letters: " + " ".join(f"{e.get('code')}->{e.get('letter') or '?'}" for e in letters))
    for s in data.get("symbols", []):
        print(f"symbol: {s.get('class')} probs={['%.2f' % p for p in s.get('probs', [])]}")
    if eff:
        print(f"efficiency: {eff.get('reduction_ratio', 0):.4f} reduction "
              f"({eff.get('bits_transmitted')} vs {eff.get('baseline_bits')} baseline bits)")
        print(f"  note: {eff.get('note')}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="neurotactile",
                                     description="neuromorphic tactile pipeline simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a configured scenario")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("morse", help="run scripted Morse sessions")
    p.add_argument("--script", required=True, help="JSON list of letters or {code: ...} entries")
    p.add_argument("--config")
    p.add_argument("--seed", type=int)
    p.add_argument("--time-jitter", type=float, default=0.0)
    p.add_argument("--pressure-jitter", type=float, default=0.0)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_morse)

    p = sub.add_parser("symbols", help="symbol dataset / model workflows")
    p.add_argument("action", choices=["gen", "train", "eval"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-per-class", type=int, default=400)
    p.add_argument("--noise", type=float, default=1.0)
    p.add_argument("--data")
    p.add_argument("--model")
    p.add_argument("--out")
    p.add_argument("--epochs", type=int, default=150)
    p.add_argument("--holdout", type=float, default=0.2)
    p.set_defaults(fn=_cmd_symbols)

    p = sub.add_parser("codec", help="convert between code CSV and wire hex units")
    p.add_argument("action", choices=["encode", "decode"])
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_codec)

    p = sub.add_parser("calibrate", help="sweep synapse/threshold parameters")
    p.add_argument("--eta", type=float, nargs="+", default=[0.4, 0.5, 0.6])
    p.add_argument("--tau", type=float, nargs="+", default=[200.0, 250.0, 300.0])
    p.add_argument("--thresholds", nargs="+",
                   default=["1.8,2.4,3.0", "2.1,2.5,3.0", "1.6,2.2,2.8"])
    p.add_argument("--config")
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_calibrate)

    p = sub.add_parser("serve", help="host the live stream endpoint")
    p.add_argument("--port", type=int, required=True)
    p.add_argument("--config")
    p.add_argument("--model")
    p.add_argument("--accelerated", action="store_true",
                   help="advance time only via message timestamps")
    p.set_defaults(fn=_cmd_serve)

    p = sub.add_parser("report", help="summarize a saved run report")
    p.add_argument("--run", required=True, help="path to report.json")
    p.set_defaults(fn=_cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except CalibrationError as exc:
        print(f"calibration failed: {exc}", file=sys.stderr)
        return EXIT_CALIBRATION
    except (ConfigurationError, FormatError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SimulationError as exc:
        stage = getattr(exc, "stage", None)
        print(f"error{f' in stage {stage}' if stage else ''}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
