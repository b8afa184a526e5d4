#!/usr/bin/env python3
"""Run the full sweep, write CSV/JSON outputs, and print a study summary.

Produces, under --out-dir (default ``results/``):

* ``sweep.csv``  — one record per (scenario, method, SNR) cell
* ``sweep.json`` — the same records bundled with the configuration echo
* ``correlation.txt`` — silhouette-vs-accuracy correlation report

and prints a short verdict table (best method per scenario at each SNR,
plus the global correlation) to stdout.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from collections import defaultdict
from dataclasses import replace

from rff_lab.cli import OutputBundle, format_bundle_json, format_records_csv
from rff_lab.config import render_config
from rff_lab.experiments import correlate, default_config, run_sweep


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="results")
    parser.add_argument("--trials", type=int, default=None)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--permutations", type=int, default=1000)
    args = parser.parse_args(argv)

    cfg = default_config()
    if args.trials is not None:
        cfg = replace(cfg, n_trials=args.trials)
    if args.seed is not None:
        cfg = replace(cfg, master_seed=args.seed)

    start = time.perf_counter()
    records = run_sweep(cfg, n_threads=args.threads)
    wall = time.perf_counter() - start
    print(f"sweep finished: {len(records)} cells in {wall:.1f} s", file=sys.stderr)

    os.makedirs(args.out_dir, exist_ok=True)
    csv_path = os.path.join(args.out_dir, "sweep.csv")
    with open(csv_path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(format_records_csv(records))
    bundle = OutputBundle(
        records=records,
        config_echo=render_config(cfg),
        tool_version="0.1.0",
        wall_time_seconds=wall,
    )
    with open(os.path.join(args.out_dir, "sweep.json"), "w", encoding="utf-8",
              newline="\n") as handle:
        handle.write(format_bundle_json(bundle))

    report = correlate(records, n_permutations=args.permutations)
    report_text = (
        f"n_points = {report.n_points}\n"
        f"pearson_r = {report.pearson_r:.6f}\n"
        f"p_value = {report.p_value:.6g}\n"
        f"ls_slope = {report.ls_slope:.6f}\n"
        f"ls_intercept = {report.ls_intercept:.6f}\n"
    )
    with open(os.path.join(args.out_dir, "correlation.txt"), "w", encoding="utf-8",
              newline="\n") as handle:
        handle.write(report_text)

    print("\nempirical silhouette vs classification accuracy correlation")
    print(report_text)

    by_cell = defaultdict(list)
    for r in records:
        by_cell[(r.scenario, r.snr_db)].append(r)
    print("best method per (scenario, SNR) by empirical silhouette")
    print(f"{'scenario':<16}{'snr_db':>8}  {'best':<6}{'silhouette':>12}{'accuracy':>10}")
    for (scenario, snr_db) in sorted(by_cell, key=lambda c: (c[0].value, c[1])):
        best = max(by_cell[(scenario, snr_db)], key=lambda r: r.silhouette_empirical)
        print(
            f"{scenario.value:<16}{snr_db:>8g}  {best.method.value:<6}"
            f"{best.silhouette_empirical:>12.4f}{best.accuracy:>10.4f}"
        )
    print(f"\noutputs written under {args.out_dir}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
