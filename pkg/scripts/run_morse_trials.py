#!/usr/bin/env python3
"""Jittered Morse trials for the five-letter table; prints a confusion table."""

import argparse
from collections import Counter

import numpy as np

from neurotactile import MorseTimings, ScenarioConfig, build_morse_program, run_scenario
from neurotactile.morse import DEFAULT_MORSE_TABLE

LETTERS = {v: k for k, v in DEFAULT_MORSE_TABLE.items()}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=20)
    parser.add_argument("--seed", type=int, default=5000)
    parser.add_argument("--time-jitter", type=float, default=0.15)
    parser.add_argument("--pressure-jitter", type=float, default=0.10)
    args = parser.parse_args()

    cfg = ScenarioConfig()
    confusion = Counter()
    correct = total = 0
    for li, (letter, code) in enumerate(sorted(LETTERS.items())):
        for trial in range(args.trials):
            rng = np.random.default_rng(args.seed + 97 * li + trial)
            timings = MorseTimings(time_jitter=args.time_jitter,
                                   pressure_jitter=args.pressure_jitter)
            report = run_scenario(cfg.with_stimulus(build_morse_program(code, timings, rng)))
            decoded = report.letters[0]["letter"] if report.letters else None
            confusion[(letter, decoded or "?")] += 1
            total += 1
            correct += decoded == letter
    letters = sorted(LETTERS)
    print("      " + " ".join(f"{l:>4}" for l in letters) + "    ?")
    for actual in letters:
        row = [confusion[(actual, got)] for got in letters] + [confusion[(actual, "?")]]
        print(f"{actual:>4}: " + " ".join(f"{n:>4}" for n in row))
    print(f"\naccuracy: {correct}/{total} = {correct / total:.1%}")


if __name__ == "__main__":
    main()
