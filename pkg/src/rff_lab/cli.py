"""Command-line interface: ``rff-lab <subcommand>``.

Subcommands
-----------
``sweep``
    Run the Monte-Carlo sweep for a configuration (default or ``--config``)
    and write the records as CSV or as a JSON bundle that also echoes the
    configuration, the tool version, and the wall time.
``validate-claims``
    Check every closed-form ratio moment against a fresh Monte-Carlo oracle
    on a fixed parameter grid and print one table row per quantity.  Exits 1
    if any in-regime quantity misses its tolerance (2% for means, 5% for
    second moments; the cross-difference mean must sit within 3 standard
    errors of 0).
``correlate``
    Read a sweep CSV and report the Pearson correlation between the
    empirical silhouette score and the classification accuracy, with a
    permutation-test p-value.
``emit-config``
    Write the default configuration file.

Exit codes: 0 success, 1 validation failure, 2 input error, 3 runtime error.
All output files are UTF-8 with LF line endings; CSV floats carry 17
significant digits.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
import traceback
from dataclasses import asdict, dataclass, replace
from typing import Sequence

import numpy as np

from .channel import ChannelScenario
from .config import ConfigError, parse_config, render_config
from .experiments import (
    CorrelationReport,
    SweepRecord,
    correlate,
    default_config,
    run_sweep,
)
from .gaussian_moments import (
    GaussianSpec,
    RatioForm,
    RatioParams,
    cross_difference_moments,
    direct_ratio_moments,
    in_regime,
    mc_ratio_detail,
    paired_product_mean,
    reciprocal_moments,
)
from .signal_model import Method

__all__ = ["OutputBundle", "main", "CSV_HEADER", "format_records_csv", "parse_records_csv"]

TOOL_VERSION = "0.1.0"
ENV_THREADS = "RFF_LAB_THREADS"

CSV_HEADER = (
    "scenario,method,snr_db,silhouette_emp,silhouette_emp_se,"
    "silhouette_ana,accuracy,accuracy_se,nonfinite_rate"
)

MEAN_TOLERANCE = 0.02
SECOND_MOMENT_TOLERANCE = 0.05

#: validation grid: every combination is exercised against the oracle
VALIDATION_MU_G = (1.0,)
VALIDATION_SIGMA_G = (0.0, 0.1, 0.15)
VALIDATION_RHO = (0.5, 1.0, 2.0)
VALIDATION_SIGMA_W = (0.001, 0.01, 0.05)


@dataclass(frozen=True)
class OutputBundle:
    """Everything a sweep run emits in JSON format."""

    records: list[SweepRecord]
    config_echo: str
    tool_version: str
    wall_time_seconds: float


def _g17(value: float) -> str:
    return "%.17g" % value


def format_records_csv(records: Sequence[SweepRecord]) -> str:
    """Render sweep records with the fixed header and 17-digit floats."""
    lines = [CSV_HEADER]
    for r in records:
        lines.append(
            ",".join(
                (
                    r.scenario.value,
                    r.method.value,
                    _g17(r.snr_db),
                    _g17(r.silhouette_empirical),
                    _g17(r.silhouette_empirical_stderr),
                    _g17(r.silhouette_analytic),
                    _g17(r.accuracy),
                    _g17(r.accuracy_stderr),
                    _g17(r.nonfinite_rate),
                )
            )
        )
    return "\n".join(lines) + "\n"


def parse_records_csv(text: str) -> list[SweepRecord]:
    """Read records written by `format_records_csv` (column order free)."""
    reader = csv.DictReader(io.StringIO(text))
    expected = CSV_HEADER.split(",")
    if reader.fieldnames is None or set(expected) - set(reader.fieldnames):
        missing = sorted(set(expected) - set(reader.fieldnames or ()))
        raise ValueError(f"records CSV is missing columns: {', '.join(missing)}")
    records = []
    for row_no, row in enumerate(reader, start=2):
        try:
            records.append(
                SweepRecord(
                    scenario=ChannelScenario(row["scenario"]),
                    method=Method(row["method"]),
                    snr_db=float(row["snr_db"]),
                    silhouette_empirical=float(row["silhouette_emp"]),
                    silhouette_empirical_stderr=float(row["silhouette_emp_se"]),
                    silhouette_analytic=float(row["silhouette_ana"]),
                    accuracy=float(row["accuracy"]),
                    accuracy_stderr=float(row["accuracy_se"]),
                    nonfinite_rate=float(row["nonfinite_rate"]),
                )
            )
        except (TypeError, ValueError) as exc:
            raise ValueError(f"records CSV line {row_no}: {exc}") from None
    return records


def format_bundle_json(bundle: OutputBundle) -> str:
    payload = {
        "tool_version": bundle.tool_version,
        "wall_time_seconds": bundle.wall_time_seconds,
        "config_echo": bundle.config_echo,
        "records": [
            {
                **asdict(r),
                "scenario": r.scenario.value,
                "method": r.method.value,
            }
            for r in bundle.records
        ],
    }
    return json.dumps(payload, indent=2) + "\n"


def _write_out(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)


def _read_file(path: str) -> str:
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()


def _load_config(path: str | None):
    if path is None:
        return default_config()
    return parse_config(_read_file(path))


def _resolve_threads(cli_value: int | None) -> int:
    if cli_value is None:
        env = os.environ.get(ENV_THREADS)
        if env is None:
            return 1
        try:
            cli_value = int(env)
        except ValueError:
            raise ConfigError(f"{ENV_THREADS} must be an integer, got {env!r}") from None
    if cli_value < 1:
        raise ConfigError(f"thread count must be >= 1, got {cli_value}")
    return cli_value


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    if args.trials is not None:
        cfg = replace(cfg, n_trials=args.trials)
    if args.seed is not None:
        cfg = replace(cfg, master_seed=args.seed)
    n_threads = _resolve_threads(args.threads)

    start = time.perf_counter()
    records = run_sweep(cfg, n_threads=n_threads)
    wall = time.perf_counter() - start

    if args.format == "csv":
        text = format_records_csv(records)
    else:
        bundle = OutputBundle(
            records=records,
            config_echo=render_config(cfg),
            tool_version=TOOL_VERSION,
            wall_time_seconds=wall,
        )
        text = format_bundle_json(bundle)
    _write_out(args.out, text)
    print(
        f"sweep: {len(records)} records, {cfg.n_trials} trials/cell, "
        f"{wall:.1f} s with {n_threads} thread(s)",
        file=sys.stderr,
    )
    return 0


def _validation_seed(base_seed: int, point_index: int, form_index: int) -> int:
    return int(
        np.random.SeedSequence((base_seed, point_index, form_index)).generate_state(1)[0]
    )


def cmd_validate_claims(args: argparse.Namespace) -> int:
    if args.draws < 10**4:
        raise ConfigError(f"--draws must be >= 10000, got {args.draws}")
    start = time.perf_counter()
    header = (
        f"{'form':<18}{'quantity':<16}{'sigma_g':>8}{'rho':>6}{'sigma_w':>9}"
        f"{'analytic':>14}{'oracle':>14}{'rel_err':>10}  status"
    )
    print(header)
    print("-" * len(header))

    points = [
        (mu_g, sigma_g, rho, sigma_w)
        for mu_g in VALIDATION_MU_G
        for sigma_g in VALIDATION_SIGMA_G
        for rho in VALIDATION_RHO
        for sigma_w in VALIDATION_SIGMA_W
    ]
    n_failures = 0
    n_rows = 0
    for point_index, (mu_g, sigma_g, rho, sigma_w) in enumerate(points):
        g = GaussianSpec(mean=mu_g, variance=sigma_g**2)
        p = RatioParams(rho=rho, noise_variance=sigma_w**2)
        gated = in_regime(g, p)
        for form_index, form in enumerate(RatioForm):
            seed = _validation_seed(args.seed, point_index, form_index)
            mc = mc_ratio_detail(form, g, p, args.draws, seed)
            if form is RatioForm.DIRECT_RATIO:
                analytic = direct_ratio_moments(g, p)
                quantities = [("mean", analytic.mean, MEAN_TOLERANCE),
                              ("second_moment", analytic.second_moment,
                               SECOND_MOMENT_TOLERANCE)]
            elif form is RatioForm.PAIRED_PRODUCT:
                quantities = [("mean", paired_product_mean(g, p), MEAN_TOLERANCE)]
            elif form is RatioForm.CROSS_DIFFERENCE:
                analytic = cross_difference_moments(g, p)
                quantities = [("mean", analytic.mean, None),
                              ("second_moment", analytic.second_moment,
                               SECOND_MOMENT_TOLERANCE)]
            else:
                analytic = reciprocal_moments(g, p)
                quantities = [("mean", analytic.mean, MEAN_TOLERANCE),
                              ("second_moment", analytic.second_moment,
                               SECOND_MOMENT_TOLERANCE)]

            for quantity, predicted, tolerance in quantities:
                n_rows += 1
                observed = (
                    mc.moments.mean if quantity == "mean" else mc.moments.second_moment
                )
                if tolerance is None:
                    # zero-mean prediction: gate on the oracle's own standard error
                    ok = abs(observed) <= 3.0 * mc.se_mean
                    rel_text = "-"
                else:
                    rel_err = abs(predicted - observed) / abs(observed)
                    ok = rel_err <= tolerance
                    rel_text = f"{rel_err:.5f}"
                if gated and not ok:
                    n_failures += 1
                status = ("ok" if ok else "FAIL") + ("" if gated else " (out-of-regime)")
                print(
                    f"{form.value:<18}{quantity:<16}{sigma_g:>8g}{rho:>6g}{sigma_w:>9g}"
                    f"{predicted:>14.6g}{observed:>14.6g}{rel_text:>10}  {status}"
                )

    wall = time.perf_counter() - start
    print("-" * len(header))
    print(
        f"checked {len(points)} grid points ({n_rows} quantities) with "
        f"{args.draws} draws each in {wall:.1f} s"
    )
    if n_failures:
        print(f"validation FAILED: {n_failures} in-regime quantities out of tolerance")
        return 1
    print("validation passed: all in-regime quantities within tolerance")
    return 0


def cmd_correlate(args: argparse.Namespace) -> int:
    records = parse_records_csv(_read_file(args.records))
    report = correlate(records, n_permutations=args.permutations, seed=args.seed)
    if args.format == "json":
        text = json.dumps(asdict(report), indent=2) + "\n"
    else:
        text = (
            f"n_points = {report.n_points}\n"
            f"pearson_r = {_g17(report.pearson_r)}\n"
            f"p_value = {_g17(report.p_value)}\n"
            f"ls_slope = {_g17(report.ls_slope)}\n"
            f"ls_intercept = {_g17(report.ls_intercept)}\n"
        )
    _write_out(args.out, text)
    return 0


def cmd_emit_config(args: argparse.Namespace) -> int:
    _write_out(args.out, render_config(default_config()))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rff-lab",
        description="Simulation laboratory for radio-frequency-fingerprint "
        "feature extraction.",
    )
    parser.add_argument("--version", action="version", version=f"rff-lab {TOOL_VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="run the Monte-Carlo sweep")
    sweep.add_argument("--config", default=None, help="configuration file path")
    sweep.add_argument("--out", default=None, help="output path (default: stdout)")
    sweep.add_argument("--format", choices=("csv", "json"), default="csv")
    sweep.add_argument(
        "--seed", type=int, default=None,
        help="master seed override (default 42 via the configuration)",
    )
    sweep.add_argument(
        "--threads", type=int, default=None,
        help=f"worker processes (default: ${ENV_THREADS} or 1)",
    )
    sweep.add_argument("--trials", type=int, default=None, help="trials per cell override")
    sweep.set_defaults(func=cmd_sweep)

    validate = sub.add_parser(
        "validate-claims", help="compare closed-form moments against the oracle"
    )
    validate.add_argument("--draws", type=int, default=10**6, help="oracle draws per form")
    validate.add_argument("--seed", type=int, default=42)
    validate.set_defaults(func=cmd_validate_claims)

    corr = sub.add_parser(
        "correlate", help="correlate empirical vs analytic scores from a sweep CSV"
    )
    corr.add_argument("--records", required=True, help="CSV written by 'sweep'")
    corr.add_argument("--permutations", type=int, default=1000)
    corr.add_argument("--seed", type=int, default=42)
    corr.add_argument("--format", choices=("text", "json"), default="text")
    corr.add_argument("--out", default=None)
    corr.set_defaults(func=cmd_correlate)

    emit = sub.add_parser("emit-config", help="write the default configuration")
    emit.add_argument("--out", default=None)
    emit.set_defaults(func=cmd_emit_config)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception:  # pragma: no cover - defensive
        traceback.print_exc()
        return 3


if __name__ == "__main__":
    sys.exit(main())
