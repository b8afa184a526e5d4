"""Simulation laboratory for radio-frequency-fingerprint feature extraction.

The package models per-subcarrier device fingerprints observed through a
real-Gaussian channel, implements five feature-extraction methods, and
compares Monte-Carlo silhouette scores and classification accuracies against
closed-form (Taylor/delta-method) predictions.
"""

from .analytic import ExpectedScores, expected_inter, expected_intra, expected_scores, expected_silhouette
from .channel import ChannelParams, ChannelScenario, Phase, ScenarioMoments, init_trial_channel, sample_csi_block
from .classifier import LdaModel, accuracy, fit, predict, predict_batch
from .config import ConfigError, parse_config, render_config
from .experiments import (
    CorrelationReport,
    ExperimentConfig,
    SweepRecord,
    TrialResult,
    correlate,
    default_config,
    run_sweep,
    run_trial,
)
from .gaussian_moments import (
    GaussianMoments,
    GaussianSpec,
    McRatioResult,
    RatioForm,
    RatioParams,
    cross_difference_moments,
    direct_ratio_moments,
    in_regime,
    mc_ratio_detail,
    mc_ratio_oracle,
    paired_product_mean,
    reciprocal_moments,
)
from .signal_model import (
    DeviceFingerprint,
    FeatureMatrix,
    FeatureMoments,
    Method,
    ModelParams,
    analytic_feature_moments,
    draw_fingerprint,
    extract_batch,
)
from .silhouette import SilhouetteBreakdown, normalize, normalize_block, silhouette_from_normalized, silhouette_score

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "ChannelParams",
    "ChannelScenario",
    "ConfigError",
    "CorrelationReport",
    "DeviceFingerprint",
    "ExpectedScores",
    "ExperimentConfig",
    "FeatureMatrix",
    "FeatureMoments",
    "GaussianMoments",
    "GaussianSpec",
    "LdaModel",
    "McRatioResult",
    "Method",
    "ModelParams",
    "Phase",
    "RatioForm",
    "RatioParams",
    "ScenarioMoments",
    "SilhouetteBreakdown",
    "SweepRecord",
    "TrialResult",
    "accuracy",
    "analytic_feature_moments",
    "correlate",
    "cross_difference_moments",
    "default_config",
    "direct_ratio_moments",
    "draw_fingerprint",
    "expected_inter",
    "expected_intra",
    "expected_scores",
    "expected_silhouette",
    "extract_batch",
    "fit",
    "in_regime",
    "init_trial_channel",
    "mc_ratio_detail",
    "mc_ratio_oracle",
    "normalize",
    "normalize_block",
    "paired_product_mean",
    "parse_config",
    "predict",
    "predict_batch",
    "reciprocal_moments",
    "render_config",
    "run_sweep",
    "run_trial",
    "sample_csi_block",
    "silhouette_from_normalized",
    "silhouette_score",
]
