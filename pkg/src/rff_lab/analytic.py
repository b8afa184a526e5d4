"""Closed-form (second-order) expected silhouette distances and scores.

Each extracted feature decomposes per subcarrier as ``r = a * t * phi + w``
where ``t`` is the device fingerprint variate, ``phi`` is the channel/noise
factor of the method's law, ``a`` is a deterministic amplitude, and ``w`` is
additive noise (absent for the pure-ratio methods).  After per-sample
z-normalization, a normalized training sample and a normalized test sample
are approximately standardized, so their expected squared distance over K
subcarriers is

    D = K * (2 - 2 * (E[r_tr * r_te] - mu_tr * mu_te) / (sigma_tr * sigma_te))

with per-phase feature moments ``(mu, sigma^2)`` from
`analytic_feature_moments`.  Only the cross moment ``E[r_tr * r_te]``
distinguishes the cases:

* intra (same device) shares the fingerprint: ``E[t^2] = mu_t^2 + sigma_t^2``;
  inter (different devices) factorizes: ``E[t] E[t'] = mu_t^2``;
* the deterministic scenario shares one channel realization between the
  phases, giving a shared-channel factor ``E[g(H)^2]`` with
  ``g(H) = E_noise[phi]``; both stochastic scenarios draw independent
  channels, giving ``E[phi_tr] * E[phi_te]``.

The expected silhouette score is the matching closed ratio

    S = a_tr a_te sigma_t^2 Phi / (sigma_tr sigma_te
        - a_tr a_te mu_t^2 (Phi - E[phi_tr] E[phi_te]))

where ``Phi`` is the scenario's shared factor (``E[g^2]`` deterministic,
``E[phi_tr] E[phi_te]`` stochastic); it equals ``(inter - intra)/inter`` of
the distances above.  All expressions are exact for RAW and second-order
approximations for the four ratio methods; they degrade when the noise is
not small against the ratio denominators.
"""

from __future__ import annotations

from dataclasses import dataclass

from .channel import ChannelScenario, Phase, ScenarioMoments
from .signal_model import (
    FeatureMoments,
    Method,
    ModelParams,
    amplification_factor,
    analytic_feature_moments,
)

__all__ = [
    "ExpectedScores",
    "ScenarioMoments",
    "expected_intra",
    "expected_inter",
    "expected_silhouette",
    "expected_scores",
]


@dataclass(frozen=True)
class ExpectedScores:
    """Expected intra distance, inter distance, and silhouette score."""

    intra: float
    inter: float
    silhouette: float


@dataclass(frozen=True)
class _PhaseTerms:
    """Per-phase ingredients of the cross-moment expressions."""

    amplitude: float  # a: deterministic feature amplitude
    phi_mean: float  # E[phi]: mean of the channel/noise factor
    moments: FeatureMoments  # (mu, sigma^2) of the full feature


def _fingerprint_moments(method: Method, params: ModelParams) -> tuple[float, float]:
    """(mu_t, sigma_t^2) of the fingerprint variate the method observes."""
    if method is Method.SL:
        return params.mu_s, params.sigma_s**2
    return params.mu_u, params.sigma_u**2


def _ratio_scale(method: Method, params: ModelParams) -> float:
    """Denominator scale of the method's ratio (gamma for SL, beta otherwise)."""
    return params.gamma() if method is Method.SL else params.beta()


def _phase_terms(
    method: Method, params: ModelParams, channel_moments: tuple[float, float]
) -> _PhaseTerms:
    mu_c, sig_c2 = channel_moments
    moments = analytic_feature_moments(method, params, channel_moments)
    if method is Method.RAW:
        return _PhaseTerms(params.f_ra * params.x, mu_c, moments)
    rho = _ratio_scale(method, params)
    phi_mean = (rho**2 * mu_c**2 + params.sigma_n**2) / (rho**3 * mu_c**2)
    if method is Method.SL:
        amplitude = params.f_ra * params.x
    elif method is Method.CR:
        amplitude = params.f_ra * params.x
    elif method is Method.PC:
        amplitude = params.f_ra * params.x**2
    else:  # RC
        amplitude = params.f_ra * amplification_factor(params, channel_moments)
    return _PhaseTerms(amplitude, phi_mean, moments)


def _shared_channel_factor(
    method: Method, params: ModelParams, channel_moments: tuple[float, float]
) -> float:
    """E[g(H)^2] when one channel realization serves both phases."""
    mu_c, sig_c2 = channel_moments
    if method is Method.RAW:
        return mu_c**2 + sig_c2
    rho = _ratio_scale(method, params)
    return (rho**2 * mu_c**2 + 2.0 * params.sigma_n**2) / (rho**4 * mu_c**2)


def _setup(
    method: Method, scenario: ChannelScenario, params: ModelParams
) -> tuple[_PhaseTerms, _PhaseTerms, float]:
    """Per-phase terms plus the scenario's cross factor Phi."""
    moments = ScenarioMoments.resolve(params.channel, scenario)
    mu_tr, sig_tr = moments.for_phase(Phase.TRAIN)
    mu_te, sig_te = moments.for_phase(Phase.TEST)
    train = _phase_terms(method, params, (mu_tr, sig_tr**2))
    test = _phase_terms(method, params, (mu_te, sig_te**2))
    if scenario is ChannelScenario.DETERMINISTIC:
        phi_cross = _shared_channel_factor(method, params, (mu_tr, sig_tr**2))
    else:
        phi_cross = train.phi_mean * test.phi_mean
    return train, test, phi_cross


def _std_product(train: _PhaseTerms, test: _PhaseTerms) -> float:
    product = (train.moments.variance * test.moments.variance) ** 0.5
    if product == 0.0:
        raise ValueError("feature variance is zero; normalized distances undefined")
    return product


def _expected_distance(
    method: Method,
    scenario: ChannelScenario,
    params: ModelParams,
    fingerprint_sq: float,
) -> float:
    train, test, phi_cross = _setup(method, scenario, params)
    cross = train.amplitude * test.amplitude * fingerprint_sq * phi_cross
    centered = cross - train.moments.mean * test.moments.mean
    k = method.subcarriers(params)
    return k * (2.0 - 2.0 * centered / _std_product(train, test))


def expected_intra(
    method: Method, scenario: ChannelScenario, params: ModelParams
) -> float:
    """Expected mean squared normalized distance to the same device's test set."""
    mu_t, sig_t2 = _fingerprint_moments(method, params)
    return _expected_distance(method, scenario, params, mu_t**2 + sig_t2)


def expected_inter(
    method: Method, scenario: ChannelScenario, params: ModelParams
) -> float:
    """Expected mean squared normalized distance to another device's test set."""
    mu_t, _ = _fingerprint_moments(method, params)
    return _expected_distance(method, scenario, params, mu_t**2)


def expected_silhouette(
    method: Method, scenario: ChannelScenario, params: ModelParams
) -> float:
    """Closed-form expected silhouette score, ``(inter - intra) / inter``."""
    mu_t, sig_t2 = _fingerprint_moments(method, params)
    train, test, phi_cross = _setup(method, scenario, params)
    gain = train.amplitude * test.amplitude
    numerator = gain * sig_t2 * phi_cross
    denominator = _std_product(train, test) - gain * mu_t**2 * (
        phi_cross - train.phi_mean * test.phi_mean
    )
    if denominator <= 0.0:
        raise ValueError(
            "expected inter distance is not positive; score undefined at these "
            "parameters"
        )
    return numerator / denominator


def expected_scores(
    method: Method, scenario: ChannelScenario, params: ModelParams
) -> ExpectedScores:
    """The intra/inter distances and silhouette score in one bundle."""
    return ExpectedScores(
        intra=expected_intra(method, scenario, params),
        inter=expected_inter(method, scenario, params),
        silhouette=expected_silhouette(method, scenario, params),
    )
