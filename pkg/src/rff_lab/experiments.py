"""Monte-Carlo harness: trials, sweeps, and analytic-vs-empirical correlation.

One *trial* simulates a fresh population: a trial channel, one fingerprint
per device, ``n_train``/``n_test`` extracted samples per device per phase.
It reports the empirical silhouette score, the classification accuracy of a
discriminant fitted on the training features, and the fraction of samples
dropped for containing non-finite values.

A *sweep* runs ``n_trials`` independent trials for every (scenario, method,
SNR) cell of the grid and aggregates means and standard errors, pairing each
cell with its closed-form expected silhouette score.

Determinism: every random stream is seeded from
``(master_seed, scenario, method, round(snr_db * 1000), trial_index,
stream_id)``; results are bit-identical for a given configuration no matter
how many worker processes run the sweep, and independent of trial execution
order.  Stream ids: 0 drives the trial channel; device ``d`` uses
``3d + 1`` (fingerprint), ``3d + 2`` (train extraction), ``3d + 3`` (test
extraction).
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import classifier
from .analytic import expected_silhouette
from .channel import ChannelParams, ChannelScenario, Phase, init_trial_channel
from .signal_model import Method, ModelParams, draw_fingerprint, extract_batch
from .silhouette import normalize_block, silhouette_from_normalized

__all__ = [
    "ExperimentConfig",
    "TrialResult",
    "SweepRecord",
    "CorrelationReport",
    "default_config",
    "run_trial",
    "run_sweep",
    "correlate",
]

#: SNR grid (dB) of the default sweep.
DEFAULT_SNR_GRID_DB = (0.0, 10.0, 20.0, 25.0, 30.0, 35.0, 40.0)

MIN_PERMUTATIONS = 1_000

_SCENARIO_ORD = {s: i for i, s in enumerate(ChannelScenario)}
_METHOD_ORD = {m: i for i, m in enumerate(Method)}


@dataclass(frozen=True)
class ExperimentConfig:
    """Full specification of a sweep."""

    params: ModelParams
    scenarios: tuple[ChannelScenario, ...]
    methods: tuple[Method, ...]
    snr_db_grid: tuple[float, ...]
    n_devices: int
    n_train: int
    n_test: int
    n_trials: int
    master_seed: int
    #: classify on the same normalized features the silhouette uses; turn off
    #: to probe sensitivity to the normalization step
    classify_normalized: bool = True

    def __post_init__(self) -> None:
        if self.n_devices < 2:
            raise ValueError(f"n_devices must be >= 2, got {self.n_devices}")
        for name in ("n_train", "n_test", "n_trials"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.master_seed < 0:
            raise ValueError("master_seed must be >= 0")
        for name in ("scenarios", "methods", "snr_db_grid"):
            if len(getattr(self, name)) == 0:
                raise ValueError(f"{name} must be nonempty")
        if len(set(self.scenarios)) != len(self.scenarios):
            raise ValueError("scenarios contains duplicates")
        if len(set(self.methods)) != len(self.methods):
            raise ValueError("methods contains duplicates")
        if len(set(self.snr_db_grid)) != len(self.snr_db_grid):
            raise ValueError("snr_db_grid contains duplicates")
        if not all(math.isfinite(v) for v in self.snr_db_grid):
            raise ValueError("snr_db_grid must be finite")


@dataclass(frozen=True)
class TrialResult:
    """Outcome of one simulated population."""

    silhouette: float
    accuracy: float
    nonfinite_rate: float


@dataclass(frozen=True)
class SweepRecord:
    """Aggregated results of one (scenario, method, SNR) cell."""

    scenario: ChannelScenario
    method: Method
    snr_db: float
    silhouette_empirical: float
    silhouette_empirical_stderr: float
    silhouette_analytic: float
    accuracy: float
    accuracy_stderr: float
    nonfinite_rate: float


@dataclass(frozen=True)
class CorrelationReport:
    """Agreement between analytic and empirical silhouette scores."""

    pearson_r: float
    p_value: float
    ls_slope: float
    ls_intercept: float
    n_points: int


def default_config() -> ExperimentConfig:
    """Reference configuration: the standard parameter set and full grid."""
    channel = ChannelParams(mu_h=1.0, sigma_h=0.15, mu_h_non=1.0, sigma_h_non=0.2)
    params = ModelParams(
        x=1.0,
        f_ra=1.0,
        f_ta=1.0,
        f_ru=1.0,
        f_tu_l=1.0,
        eta=2.0,
        r_l=52,
        r_s=12,
        mu_u=1.0,
        sigma_u=0.1,
        mu_s=1.0,
        sigma_s=0.08,
        sigma_n=0.1,
        channel=channel,
    )
    return ExperimentConfig(
        params=params,
        scenarios=tuple(ChannelScenario),
        methods=tuple(Method),
        snr_db_grid=DEFAULT_SNR_GRID_DB,
        n_devices=10,
        n_train=100,
        n_test=100,
        n_trials=200,
        master_seed=42,
    )


def _stream_rng(
    master_seed: int,
    scenario: ChannelScenario,
    method: Method,
    snr_db: float,
    trial_index: int,
    stream: int,
) -> np.random.Generator:
    snr_key = int(round(snr_db * 1000.0)) & 0xFFFFFFFFFFFFFFFF
    seq = np.random.SeedSequence(
        (
            master_seed,
            _SCENARIO_ORD[scenario],
            _METHOD_ORD[method],
            snr_key,
            trial_index,
            stream,
        )
    )
    return np.random.default_rng(seq)


def _drop_nonfinite_rows(matrix: np.ndarray) -> tuple[np.ndarray, int]:
    """Remove rows containing non-finite entries; return (kept, n_dropped)."""
    finite = np.isfinite(matrix).all(axis=1)
    n_dropped = int(matrix.shape[0] - finite.sum())
    return (matrix if n_dropped == 0 else matrix[finite]), n_dropped


def run_trial(
    cfg: ExperimentConfig,
    scenario: ChannelScenario,
    method: Method,
    snr_db: float,
    trial_index: int,
) -> TrialResult:
    """One independent population simulation; deterministic in its indices.

    Samples with non-finite features are excluded from both the silhouette
    and the classifier; their fraction is reported (a high rate degrades the
    estimates but does not abort the trial).
    """
    params = cfg.params.with_snr(snr_db)
    k = method.subcarriers(params)

    def rng(stream: int) -> np.random.Generator:
        return _stream_rng(cfg.master_seed, scenario, method, snr_db, trial_index, stream)

    trial = init_trial_channel(scenario, params.channel, k, rng(0))

    train_sets: list[np.ndarray] = []
    test_sets: list[np.ndarray] = []
    n_dropped = 0
    n_total = 0
    for device in range(cfg.n_devices):
        fp = draw_fingerprint(params, rng(3 * device + 1))
        plan = (
            (Phase.TRAIN, cfg.n_train, 3 * device + 2, train_sets),
            (Phase.TEST, cfg.n_test, 3 * device + 3, test_sets),
        )
        for phase, n_samples, stream, sink in plan:
            raw = extract_batch(method, params, fp, trial, phase, n_samples, rng(stream))
            kept, dropped = _drop_nonfinite_rows(raw)
            n_dropped += dropped
            n_total += n_samples
            if kept.shape[0] < 2:
                raise RuntimeError(
                    f"device {device} {phase.value} set has fewer than 2 finite "
                    f"samples at snr_db={snr_db}"
                )
            sink.append(kept)

    train_norm = [normalize_block(m)[0] for m in train_sets]
    test_norm = [normalize_block(m)[0] for m in test_sets]
    score = silhouette_from_normalized(train_norm, test_norm)

    cls_train = train_norm if cfg.classify_normalized else train_sets
    cls_test = test_norm if cfg.classify_normalized else test_sets
    model = classifier.fit(cls_train)
    acc = classifier.accuracy(model, cls_test)

    return TrialResult(
        silhouette=score, accuracy=acc, nonfinite_rate=n_dropped / n_total
    )


def _mean_and_stderr(values: np.ndarray) -> tuple[float, float]:
    mean = float(values.mean())
    if values.size < 2:
        return mean, float("nan")
    return mean, float(values.std(ddof=1) / math.sqrt(values.size))


def _run_cell(
    args: tuple[ExperimentConfig, ChannelScenario, Method, float]
) -> SweepRecord:
    cfg, scenario, method, snr_db = args
    results = [
        run_trial(cfg, scenario, method, snr_db, trial) for trial in range(cfg.n_trials)
    ]
    sil = np.array([r.silhouette for r in results])
    acc = np.array([r.accuracy for r in results])
    nonfinite = np.array([r.nonfinite_rate for r in results])
    sil_mean, sil_se = _mean_and_stderr(sil)
    acc_mean, acc_se = _mean_and_stderr(acc)
    analytic = expected_silhouette(method, scenario, cfg.params.with_snr(snr_db))
    return SweepRecord(
        scenario=scenario,
        method=method,
        snr_db=snr_db,
        silhouette_empirical=sil_mean,
        silhouette_empirical_stderr=sil_se,
        silhouette_analytic=analytic,
        accuracy=acc_mean,
        accuracy_stderr=acc_se,
        nonfinite_rate=float(nonfinite.mean()),
    )


def _sorted_cells(
    cfg: ExperimentConfig,
) -> list[tuple[ExperimentConfig, ChannelScenario, Method, float]]:
    cells = [
        (cfg, scenario, method, snr_db)
        for scenario in cfg.scenarios
        for method in cfg.methods
        for snr_db in cfg.snr_db_grid
    ]
    cells.sort(key=lambda c: (c[1].value, c[2].value, c[3]))
    return cells


def run_sweep(cfg: ExperimentConfig, n_threads: int = 1) -> list[SweepRecord]:
    """All grid cells, sorted by (scenario, method, snr_db).

    ``n_threads > 1`` distributes cells over worker processes; results do not
    depend on the worker count.
    """
    if n_threads < 1:
        raise ValueError(f"n_threads must be >= 1, got {n_threads}")
    cells = _sorted_cells(cfg)
    if n_threads == 1 or len(cells) == 1:
        return [_run_cell(cell) for cell in cells]
    with ProcessPoolExecutor(max_workers=min(n_threads, len(cells))) as pool:
        return list(pool.map(_run_cell, cells))


def correlate(
    records: Sequence[SweepRecord] | Sequence[tuple[float, float]],
    n_permutations: int = MIN_PERMUTATIONS,
    seed: int = 0,
) -> CorrelationReport:
    """Pearson correlation between empirical silhouette score and accuracy.

    Accepts sweep records or plain ``(silhouette, accuracy)`` pairs.  The
    two-sided p-value comes from a permutation test that shuffles the
    accuracy column: ``(1 + #{|r_perm| >= |r_obs|}) / (n_permutations + 1)``.
    The least-squares line regresses accuracy on silhouette.
    """
    if n_permutations < MIN_PERMUTATIONS:
        raise ValueError(f"n_permutations must be >= {MIN_PERMUTATIONS}")
    if len(records) < 3:
        raise ValueError(f"need at least 3 records, got {len(records)}")
    if hasattr(records[0], "silhouette_empirical"):
        pairs = [(r.silhouette_empirical, r.accuracy) for r in records]
    else:
        pairs = [(float(s), float(a)) for s, a in records]
    x = np.array([s for s, _ in pairs])
    y = np.array([a for _, a in pairs])
    if not (np.isfinite(x).all() and np.isfinite(y).all()):
        raise ValueError("records contain non-finite scores")
    if x.std() == 0.0 or y.std() == 0.0:
        raise ValueError("zero variance: correlation undefined")

    def pearson(a: np.ndarray, b: np.ndarray) -> float:
        am = a - a.mean()
        bm = b - b.mean()
        return float((am @ bm) / math.sqrt((am @ am) * (bm @ bm)))

    r_obs = pearson(x, y)
    rng = np.random.default_rng(seed)
    exceed = sum(
        abs(pearson(x, rng.permutation(y))) >= abs(r_obs)
        for _ in range(n_permutations)
    )
    p_value = (1 + exceed) / (n_permutations + 1)
    slope, intercept = np.polyfit(x, y, deg=1)
    return CorrelationReport(
        pearson_r=r_obs,
        p_value=p_value,
        ls_slope=float(slope),
        ls_intercept=float(intercept),
        n_points=len(records),
    )
