#!/usr/bin/env python3
"""Compare Monte-Carlo silhouette scores against the closed-form predictions.

Runs a two-device sweep (the closed forms describe a generic device pair) and
prints one row per (scenario, method, SNR) with the empirical score, its
standard error, the analytic score, and the gap.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from rff_lab.experiments import default_config, run_sweep


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=300)
    parser.add_argument("--devices", type=int, default=2)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument(
        "--snr", type=float, nargs="+", default=[20.0, 25.0, 30.0, 35.0, 40.0]
    )
    args = parser.parse_args(argv)

    cfg = replace(
        default_config(),
        n_devices=args.devices,
        n_trials=args.trials,
        snr_db_grid=tuple(args.snr),
    )
    if args.seed is not None:
        cfg = replace(cfg, master_seed=args.seed)
    records = run_sweep(cfg, n_threads=args.threads)

    print(
        f"{'scenario':<16}{'method':<8}{'snr_db':>8}"
        f"{'empirical':>12}{'stderr':>10}{'analytic':>12}{'gap':>10}"
    )
    worst = 0.0
    for r in records:
        gap = r.silhouette_empirical - r.silhouette_analytic
        worst = max(worst, abs(gap))
        print(
            f"{r.scenario.value:<16}{r.method.value:<8}{r.snr_db:>8g}"
            f"{r.silhouette_empirical:>12.4f}{r.silhouette_empirical_stderr:>10.4f}"
            f"{r.silhouette_analytic:>12.4f}{gap:>10.4f}"
        )
    print(f"\nlargest |empirical - analytic| gap: {worst:.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
