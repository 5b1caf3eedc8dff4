#!/usr/bin/env python3
"""Residual-proportional power allocation versus equal power.

Runs the four headline scenarios (two strategies crossed with two initial
energy distributions) on paired seeds and prints the decay of the alive
fraction, the received SNR trajectory, and the wasted-energy summary.
"""

import argparse

from beamlife import preset, run_ensemble

SCENARIOS = [
    ("uniform, proportional", "pa-uniform"),
    ("uniform, equal power", "epa-uniform"),
    ("gaussian, proportional", "pa-gaussian"),
    ("gaussian, equal power", "epa-gaussian"),
]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--runs", type=int, default=100)
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args()

    results = {}
    for label, name in SCENARIOS:
        results[label] = run_ensemble(preset(name), runs=args.runs, workers=args.workers)

    print(f"\n=== lifetime and wasted energy ({args.runs} runs each) ===")
    print(f"{'scenario':<26} {'mean lifetime':>14} {'wasted energy':>14}")
    for label, result in results.items():
        summary = result.summary()
        print(f"{label:<26} {summary['lifetime_mean_rounds']:>10.1f} rnd {summary['wasted_pct_mean']:>12.1f} %")

    print("\n=== alive fraction and received SNR vs time (uniform energy) ===")
    pa = results["uniform, proportional"]
    epa = results["uniform, equal power"]
    horizon = max(pa.rounds, epa.rounds)
    print(f"{'round':>6} {'alive (prop)':>13} {'alive (equal)':>14} {'snr dB (prop)':>14} {'snr dB (equal)':>15}")
    for t in range(0, horizon, max(1, horizon // 15)):
        def cell(result, series):
            return f"{series[t]:.3f}" if t < result.rounds else "-"

        print(
            f"{t + 1:>6} {cell(pa, pa.alive_fraction):>13} {cell(epa, epa.alive_fraction):>14}"
            f" {cell(pa, pa.snr_db):>14} {cell(epa, epa.snr_db):>15}"
        )

    print("\nEqual power drains nodes in order of their initial budget, so the")
    print("alive fraction falls linearly and the link dies with roughly half of")
    print("the cluster energy stranded. Scaling each node by its own residual")
    print("energy keeps weak nodes alive and leaves only the quantization floor")
    print("behind.")


if __name__ == "__main__":
    main()
