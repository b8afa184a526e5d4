"""Feature extraction for the five fingerprinting methods.

A device is characterized by two per-subcarrier fingerprint vectors, drawn
once per trial and fixed across that device's samples:

* ``tu`` — the transmit-chain fingerprint used by the RAW, CR, PC, and RC
  methods, i.i.d. ``N(mu_u, sigma_u^2)`` across the ``r_l`` data subcarriers;
* ``tu_s`` — the short-preamble fingerprint used by the SL method, i.i.d.
  ``N(mu_s, sigma_s^2)`` across the ``r_s`` short-preamble subcarriers.

Per extracted sample, every method observes the same CSI vector ``H`` in its
numerator and denominator (one propagation per sample) and fresh zero-mean
Gaussian noises of variance ``sigma_n^2``, one independent draw per noise
symbol per subcarrier.  With ``gamma = f_ra*f_tu_l*x`` and
``beta = f_ru*f_ta*x``, the per-subcarrier feature laws are::

    RAW   r = f_ra*H*tu*x + N
    SL    r = (f_ra*H*tu_s*x + N_s) / (f_ra*H*f_tu_l*x + N_l)
    CR    r = (f_ra*H*tu*x   + N_a) / (f_ru*H*f_ta*x   + N_u)
    PC    r = f_ra*H*tu*x^2        / (f_ru*H*f_ta*x   + N_u) + N_a
    RC    r = alpha*f_ra*H*tu      / (f_ru*H*f_ta*x   + N_u) + N_a

where ``alpha`` scales the reciprocal payload so its transmit power reaches
the amplifier budget ``eta``: ``alpha = sqrt(eta / P)`` with ``P`` the second
moment of ``1/(beta*H + N_u)`` under the phase's CSI distribution (see
`amplification_factor`).  Division by a noisy denominator can produce
non-finite values at very low SNR; extraction reports them unmasked and the
experiment harness counts and excludes those samples.

The closed-form per-subcarrier mean/variance of each law (second-order ratio
moments; see `gaussian_moments`) is provided by `analytic_feature_moments`.

The noise level is configured through a conventional SNR mapping:
``sigma_n^2 = s^2 * 10^(-snr_db/10)`` where ``s = f_ra*mu_u*mu_h*x`` is the
nominal received amplitude of the RAW baseline (equal to 1 under the default
parameters).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .channel import ChannelParams, Phase, TrialChannel, sample_csi_block

__all__ = [
    "ModelParams",
    "Method",
    "DeviceFingerprint",
    "FeatureMatrix",
    "FeatureMoments",
    "draw_fingerprint",
    "extract_sample",
    "extract_batch",
    "amplification_factor",
    "analytic_feature_moments",
]


@dataclass(frozen=True)
class ModelParams:
    """Constants and distribution parameters of the signal model."""

    x: float
    f_ra: float
    f_ta: float
    f_ru: float
    f_tu_l: float
    eta: float
    r_l: int
    r_s: int
    mu_u: float
    sigma_u: float
    mu_s: float
    sigma_s: float
    sigma_n: float
    channel: ChannelParams

    def __post_init__(self) -> None:
        if not (self.eta > 0.0):
            raise ValueError(f"eta must be > 0, got {self.eta}")
        if self.r_l < 1 or self.r_s < 1:
            raise ValueError("subcarrier counts must be >= 1")
        if self.r_s > self.r_l:
            raise ValueError(f"r_s ({self.r_s}) must be <= r_l ({self.r_l})")
        for name in ("sigma_u", "sigma_s", "sigma_n"):
            if not (getattr(self, name) >= 0.0):
                raise ValueError(f"{name} must be >= 0")
        for name, value in (("gamma", self.gamma()), ("beta", self.beta())):
            if value == 0.0 or not math.isfinite(value):
                raise ValueError(f"{name} must be finite and nonzero, got {value}")

    def gamma(self) -> float:
        """Denominator scale of the SL ratio: ``f_ra * f_tu_l * x``."""
        return self.f_ra * self.f_tu_l * self.x

    def beta(self) -> float:
        """Denominator scale of the CR/PC/RC ratios: ``f_ru * f_ta * x``."""
        return self.f_ru * self.f_ta * self.x

    def snr_reference_amplitude(self) -> float:
        """Nominal received amplitude of the RAW baseline, ``f_ra*mu_u*mu_h*x``."""
        return self.f_ra * self.mu_u * self.channel.mu_h * self.x

    def sigma_n_for_snr(self, snr_db: float) -> float:
        """Noise std such that the RAW baseline's SNR equals ``snr_db``."""
        s = abs(self.snr_reference_amplitude())
        if s == 0.0:
            raise ValueError("SNR mapping undefined: reference amplitude is 0")
        return s * 10.0 ** (-snr_db / 20.0)

    def with_snr(self, snr_db: float) -> "ModelParams":
        """Copy of the parameters with ``sigma_n`` set from the SNR mapping."""
        return replace(self, sigma_n=self.sigma_n_for_snr(snr_db))


class Method(enum.Enum):
    """The five feature extraction methods."""

    RAW = "raw"
    SL = "sl"
    CR = "cr"
    PC = "pc"
    RC = "rc"

    def subcarriers(self, params: ModelParams) -> int:
        """Feature dimension: SL uses the short preamble's subcarriers."""
        return params.r_s if self is Method.SL else params.r_l


@dataclass(frozen=True)
class DeviceFingerprint:
    """One device's per-subcarrier fingerprints, fixed for a whole trial."""

    tu: np.ndarray
    tu_s: np.ndarray

    def __post_init__(self) -> None:
        self.tu.flags.writeable = False
        self.tu_s.flags.writeable = False


@dataclass(frozen=True)
class FeatureMatrix:
    """A cleaned (all-finite) set of extracted feature vectors."""

    values: np.ndarray
    device_id: int
    phase: Phase
    method: Method

    def __post_init__(self) -> None:
        if self.values.ndim != 2:
            raise ValueError(f"values must be 2-D, got shape {self.values.shape}")
        if not np.isfinite(self.values).all():
            raise ValueError("feature matrix contains non-finite entries")


@dataclass(frozen=True)
class FeatureMoments:
    """Closed-form per-subcarrier mean and variance of a feature law."""

    mean: float
    variance: float


def draw_fingerprint(params: ModelParams, rng: np.random.Generator) -> DeviceFingerprint:
    """Draw one device's fingerprints (``tu`` first, then ``tu_s``)."""
    tu = rng.normal(params.mu_u, params.sigma_u, size=params.r_l)
    tu_s = rng.normal(params.mu_s, params.sigma_s, size=params.r_s)
    return DeviceFingerprint(tu=tu, tu_s=tu_s)


def _phase_channel_moments(trial: TrialChannel, phase: Phase) -> tuple[float, float]:
    """(mean, variance) of the CSI distribution governing this phase's draws."""
    mu, sigma = trial.moments.for_phase(phase)
    return mu, sigma**2


def amplification_factor(
    params: ModelParams, scenario_moments: tuple[float, float]
) -> float:
    """Reciprocal-payload gain ``alpha = sqrt(eta / P)``.

    ``scenario_moments`` is ``(mu_hc, sigma_hc_sq)``, the mean and variance of
    the governing CSI distribution.  ``P`` is the second moment of
    ``1/(beta*H + N)``::

        P = (beta^2 mu^2 + 3 beta^2 sigma^2 + 3 sigma_n^2) / (beta^4 mu^4)

    so ``alpha = sqrt(eta * beta^4 mu^4 / (beta^2 mu^2 + 3 beta^2 sigma^2 + 3 sigma_n^2))``.
    """
    mu_hc, sigma_hc_sq = scenario_moments
    beta = params.beta()
    if mu_hc == 0.0:
        raise ValueError("amplification factor undefined: mu_hc == 0")
    p_num = beta**2 * mu_hc**2 + 3.0 * beta**2 * sigma_hc_sq + 3.0 * params.sigma_n**2
    if p_num <= 0.0:
        raise ValueError("amplification factor undefined: payload power is 0")
    return math.sqrt(params.eta * beta**4 * mu_hc**4 / p_num)


def extract_batch(
    method: Method,
    params: ModelParams,
    fp: DeviceFingerprint,
    trial: TrialChannel,
    phase: Phase,
    n_samples: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """(n_samples, K) raw feature matrix; may contain non-finite entries.

    Draw order within the rng stream is fixed: the CSI block first, then the
    noise blocks in formula reading order (SL: numerator then denominator;
    CR: numerator then denominator; PC/RC: denominator then additive).
    """
    k = method.subcarriers(params)
    if trial.n_subcarriers != k:
        raise ValueError(
            f"trial channel has {trial.n_subcarriers} subcarriers, "
            f"method {method.value!r} needs {k}"
        )
    x, f_ra = params.x, params.f_ra
    csi = sample_csi_block(trial, phase, rng, n_samples)

    def noise() -> np.ndarray:
        return rng.normal(0.0, params.sigma_n, size=(n_samples, k))

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if method is Method.RAW:
            return f_ra * csi * fp.tu * x + noise()
        if method is Method.SL:
            num = f_ra * csi * fp.tu_s * x + noise()
            den = f_ra * csi * params.f_tu_l * x + noise()
            return num / den
        if method is Method.CR:
            num = f_ra * csi * fp.tu * x + noise()
            den = params.f_ru * csi * params.f_ta * x + noise()
            return num / den
        if method is Method.PC:
            den = params.f_ru * csi * params.f_ta * x + noise()
            return f_ra * csi * fp.tu * x**2 / den + noise()
        if method is Method.RC:
            alpha = amplification_factor(params, _phase_channel_moments(trial, phase))
            den = params.f_ru * csi * params.f_ta * x + noise()
            return alpha * f_ra * csi * fp.tu / den + noise()
    raise ValueError(f"unknown method: {method!r}")


def extract_sample(
    method: Method,
    params: ModelParams,
    fp: DeviceFingerprint,
    trial: TrialChannel,
    phase: Phase,
    rng: np.random.Generator,
) -> np.ndarray:
    """One extracted feature vector of length K (non-finite values unmasked)."""
    return extract_batch(method, params, fp, trial, phase, 1, rng)[0]


def analytic_feature_moments(
    method: Method,
    params: ModelParams,
    scenario_moments: tuple[float, float],
) -> FeatureMoments:
    """Closed-form per-subcarrier (mean, variance) of one feature law.

    ``scenario_moments`` is ``(mu_hc, sigma_hc_sq)`` of the governing CSI
    distribution.  RAW's moments are exact; the four ratio laws use the
    second-order approximations from `gaussian_moments`.
    """
    mu_h, sig_h2 = scenario_moments
    x, f = params.x, params.f_ra
    sn2 = params.sigma_n**2
    mu_u, su2 = params.mu_u, params.sigma_u**2
    mu_s, ss2 = params.mu_s, params.sigma_s**2

    if method is Method.RAW:
        return FeatureMoments(
            mean=f * x * mu_u * mu_h,
            variance=f**2 * x**2 * (mu_u**2 * sig_h2 + su2 * mu_h**2 + su2 * sig_h2)
            + sn2,
        )
    if mu_h == 0.0:
        raise ValueError("feature moments undefined: mu_hc == 0")
    if method is Method.SL:
        g = params.gamma()
        mean = f * x * mu_s * (g**2 * mu_h**2 + sn2) / (g**3 * mu_h**2)
        variance = (
            f**2 * x**2 * (
                mu_s**2 * sn2 * (g**2 * mu_h**2 - sn2)
                + g**2 * mu_h**2 * ss2 * (g**2 * mu_h**2 + 3.0 * sn2)
            )
            + g**2 * sn2 * (g**2 * mu_h**2 + 3.0 * g**2 * sig_h2 + 3.0 * sn2)
        ) / (g**6 * mu_h**4)
        return FeatureMoments(mean, variance)
    b = params.beta()
    if method is Method.CR:
        mean = f * x * mu_u * (b**2 * mu_h**2 + sn2) / (b**3 * mu_h**2)
        variance = (
            f**2 * x**2 * (
                mu_u**2 * sn2 * (b**2 * mu_h**2 - sn2)
                + b**2 * mu_h**2 * su2 * (b**2 * mu_h**2 + 3.0 * sn2)
            )
            + b**2 * sn2 * (b**2 * mu_h**2 + 3.0 * b**2 * sig_h2 + 3.0 * sn2)
        ) / (b**6 * mu_h**4)
        return FeatureMoments(mean, variance)
    if method is Method.PC:
        mean = f * x**2 * mu_u * (b**2 * mu_h**2 + sn2) / (b**3 * mu_h**2)
        variance = (
            f**2 * x**4 * (
                mu_u**2 * sn2 * (b**2 * mu_h**2 - sn2)
                + b**2 * mu_h**2 * su2 * (b**2 * mu_h**2 + 3.0 * sn2)
            )
        ) / (b**6 * mu_h**4) + sn2
        return FeatureMoments(mean, variance)
    if method is Method.RC:
        alpha = amplification_factor(params, scenario_moments)
        mean = alpha * f * mu_u * (b**2 * mu_h**2 + sn2) / (b**3 * mu_h**2)
        variance = (
            alpha**2 * f**2 * (
                mu_u**2 * sn2 * (b**2 * mu_h**2 - sn2)
                + su2 * (b**4 * mu_h**4 + 3.0 * b**2 * mu_h**2 * sn2)
            )
        ) / (b**6 * mu_h**4) + sn2
        return FeatureMoments(mean, variance)
    raise ValueError(f"unknown method: {method!r}")
