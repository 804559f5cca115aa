#!/usr/bin/env python3
"""Sweep synapse gain/decay and comparator thresholds; print the table.

The shipped defaults came out of this sweep: each configuration is scored by
how well constant-frequency probes (2.5..11 Hz over 4 s) reproduce their
pulse counts in the windowed peak counter.
"""

import argparse

from neurotactile.calibrate import calibrate


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--eta", type=float, nargs="+", default=[0.4, 0.5, 0.6, 0.7])
    parser.add_argument("--tau", type=float, nargs="+", default=[200.0, 250.0, 300.0])
    parser.add_argument("--thresholds", nargs="+",
                        default=["1.8,2.4,3.0", "2.1,2.5,3.0", "1.6,2.2,2.8", "2.0,2.6,3.1"])
    args = parser.parse_args()
    threshold_sets = [tuple(float(x) for x in t.split(",")) for t in args.thresholds]
    best, table = calibrate(args.eta, args.tau, threshold_sets)
    print(f"{'eta':>5} {'tau':>6} {'thresholds':>18} {'counts':>24} {'margin':>8}")
    for e in table:
        print(f"{e.eta:>5} {e.tau_ms:>6} {str(e.thresholds_v):>18} "
              f"{str(e.counts):>24} {e.margin:>8.3f} {'PASS' if e.passed else 'fail'}")
    print(f"\nbest: eta={best.synapse.eta} tau={best.synapse.tau_ms} "
          f"thresholds={best.quantizer.thresholds_v}")


if __name__ == "__main__":
    main()
