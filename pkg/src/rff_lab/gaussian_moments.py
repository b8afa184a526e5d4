"""Second-order Taylor (delta-method) moments of four Gaussian ratio forms.

Throughout, ``G ~ N(mu_g, sigma_g^2)`` is a Gaussian signal variable and the
noise variables ``W, W1, W2 ~ N(0, sigma_w^2)`` are i.i.d. and independent of
``G``.  The four ratio forms and their second-order moment approximations
(Taylor expansion of the ratio around the noise-free point, then expectation)
are:

``DIRECT_RATIO``      ``Z = G / (rho*G + W)``::

    E[Z]   = (rho^2 mu_g^2 +   sigma_w^2) / (rho^3 mu_g^2)
    E[Z^2] = (rho^2 mu_g^2 + 3 sigma_w^2) / (rho^4 mu_g^2)

``PAIRED_PRODUCT``    ``Z = G^2 / ((rho*G + W1)(rho*G + W2))``::

    E[Z]   = (rho^2 mu_g^2 + 2 sigma_w^2) / (rho^4 mu_g^2)

``CROSS_DIFFERENCE``  ``Z = (G1*W2 - G2*W1) / ((rho*G1 + W1)(rho*G2 + W2))``
with ``G1, G2`` i.i.d. copies of ``G``::

    E[Z]   = 0
    E[Z^2] = 2 sigma_w^2 / (rho^4 mu_g^2)

``RECIPROCAL``        ``Z = 1 / (rho*G + W)``::

    E[Z]   = (rho^2 mu_g^2 + rho^2 sigma_g^2 +   sigma_w^2) / (rho^3 mu_g^3)
    E[Z^2] = (rho^2 mu_g^2 + 3 rho^2 sigma_g^2 + 3 sigma_w^2) / (rho^4 mu_g^4)

Only the reciprocal form retains ``sigma_g^2`` terms; the other three drop
them by construction (their expansions treat the signal at its mean), which
limits accuracy when ``sigma_g/mu_g`` is not small.  All four are implemented
verbatim — no extra correction terms.  The expansions are accurate in the
high-SNR regime ``sigma_w / (|rho| mu_g) <= 0.1``; `mc_ratio_oracle` provides
a brute-force Monte-Carlo estimate to quantify the approximation error, and
`in_regime` exposes the regime gate.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "GaussianSpec",
    "RatioParams",
    "GaussianMoments",
    "McRatioResult",
    "RatioForm",
    "direct_ratio_moments",
    "paired_product_mean",
    "cross_difference_moments",
    "reciprocal_moments",
    "mc_ratio_oracle",
    "mc_ratio_detail",
    "in_regime",
    "MAX_NONFINITE_FRACTION",
]

#: Largest tolerated fraction of non-finite Monte-Carlo draws before the
#: oracle refuses the parameter point as outside the approximation regime.
MAX_NONFINITE_FRACTION = 1e-3


@dataclass(frozen=True)
class GaussianSpec:
    """Mean and variance of the Gaussian signal variable ``G``."""

    mean: float
    variance: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.mean):
            raise ValueError(f"mean must be finite, got {self.mean}")
        if not (self.variance >= 0.0):
            raise ValueError(f"variance must be >= 0, got {self.variance}")

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)


@dataclass(frozen=True)
class RatioParams:
    """Denominator slope ``rho`` and the zero-mean noise variance ``sigma_w^2``."""

    rho: float
    noise_variance: float

    def __post_init__(self) -> None:
        if self.rho == 0.0 or not math.isfinite(self.rho):
            raise ValueError(f"rho must be finite and nonzero, got {self.rho}")
        if not (self.noise_variance >= 0.0):
            raise ValueError(
                f"noise_variance must be >= 0, got {self.noise_variance}"
            )

    @property
    def noise_std(self) -> float:
        return math.sqrt(self.noise_variance)


@dataclass(frozen=True)
class GaussianMoments:
    """First moment ``E[Z]`` and raw second moment ``E[Z^2]`` of a ratio."""

    mean: float
    second_moment: float

    @property
    def variance(self) -> float:
        return self.second_moment - self.mean**2


@dataclass(frozen=True)
class McRatioResult:
    """Monte-Carlo moments plus the standard errors needed to judge them."""

    moments: GaussianMoments
    se_mean: float
    se_second_moment: float
    n_effective: int
    nonfinite_fraction: float


class RatioForm(enum.Enum):
    """The four ratio structures whose moments this module approximates."""

    DIRECT_RATIO = "direct_ratio"
    PAIRED_PRODUCT = "paired_product"
    CROSS_DIFFERENCE = "cross_difference"
    RECIPROCAL = "reciprocal"


def _check_domain(g: GaussianSpec, p: RatioParams) -> None:
    if g.mean == 0.0:
        raise ValueError("formula is singular at mu_g == 0")
    if p.rho == 0.0:  # unreachable through RatioParams, kept for direct calls
        raise ValueError("formula is singular at rho == 0")


def in_regime(g: GaussianSpec, p: RatioParams) -> bool:
    """True when ``sigma_w / (|rho| mu_g) <= 0.1``, the high-SNR regime gate."""
    return p.noise_std <= 0.1 * abs(p.rho) * abs(g.mean)


def direct_ratio_moments(g: GaussianSpec, p: RatioParams) -> GaussianMoments:
    """Moments of ``Z = G/(rho*G + W)``.

    Implemented in the factored form ``(1/rho)(1 + q)`` with
    ``q = sigma_w^2/(rho^2 mu_g^2)`` so the zero-noise limit ``1/rho`` is
    exact in floating point.
    """
    _check_domain(g, p)
    q = p.noise_variance / (p.rho**2 * g.mean**2)
    return GaussianMoments(
        mean=(1.0 / p.rho) * (1.0 + q),
        second_moment=(1.0 / p.rho**2) * (1.0 + 3.0 * q),
    )


def paired_product_mean(g: GaussianSpec, p: RatioParams) -> float:
    """First moment of ``Z = G^2 / ((rho*G + W1)(rho*G + W2))``."""
    _check_domain(g, p)
    q = p.noise_variance / (p.rho**2 * g.mean**2)
    return (1.0 / p.rho**2) * (1.0 + 2.0 * q)


def cross_difference_moments(g: GaussianSpec, p: RatioParams) -> GaussianMoments:
    """Moments of ``Z = (G1*W2 - G2*W1)/((rho*G1 + W1)(rho*G2 + W2))``.

    The approximate mean is exactly 0 for every valid input.
    """
    _check_domain(g, p)
    return GaussianMoments(
        mean=0.0,
        second_moment=2.0 * p.noise_variance / (p.rho**4 * g.mean**2),
    )


def reciprocal_moments(g: GaussianSpec, p: RatioParams) -> GaussianMoments:
    """Moments of ``Z = 1/(rho*G + W)``; the only form keeping sigma_g terms."""
    _check_domain(g, p)
    q = (p.rho**2 * g.variance + p.noise_variance) / (p.rho**2 * g.mean**2)
    scale = 1.0 / (p.rho * g.mean)
    return GaussianMoments(
        mean=scale * (1.0 + q),
        second_moment=scale**2 * (1.0 + 3.0 * q),
    )


def _draw_ratio(
    form: RatioForm, g: GaussianSpec, p: RatioParams, n_draws: int, rng: np.random.Generator
) -> np.ndarray:
    """One vector of i.i.d. realizations of the selected ratio form.

    Draw order is fixed (signal variables first, then noises, numerator
    before denominator) so results are reproducible for a given seed.
    """
    mu, sg, sw, rho = g.mean, g.std, p.noise_std, p.rho
    if form is RatioForm.DIRECT_RATIO:
        gg = rng.normal(mu, sg, n_draws)
        w = rng.normal(0.0, sw, n_draws)
        return gg / (rho * gg + w)
    if form is RatioForm.PAIRED_PRODUCT:
        gg = rng.normal(mu, sg, n_draws)
        w1 = rng.normal(0.0, sw, n_draws)
        w2 = rng.normal(0.0, sw, n_draws)
        return gg**2 / ((rho * gg + w1) * (rho * gg + w2))
    if form is RatioForm.CROSS_DIFFERENCE:
        g1 = rng.normal(mu, sg, n_draws)
        g2 = rng.normal(mu, sg, n_draws)
        w1 = rng.normal(0.0, sw, n_draws)
        w2 = rng.normal(0.0, sw, n_draws)
        return (g1 * w2 - g2 * w1) / ((rho * g1 + w1) * (rho * g2 + w2))
    if form is RatioForm.RECIPROCAL:
        gg = rng.normal(mu, sg, n_draws)
        w = rng.normal(0.0, sw, n_draws)
        return 1.0 / (rho * gg + w)
    raise ValueError(f"unknown ratio form: {form!r}")


def mc_ratio_detail(
    form: RatioForm,
    g: GaussianSpec,
    p: RatioParams,
    n_draws: int,
    seed: int,
) -> McRatioResult:
    """Monte-Carlo moments of a ratio form, with standard errors.

    Non-finite draws (denominator zero-crossings) are excluded from the
    moments and reported via ``nonfinite_fraction``; more than 0.1% of them
    raises, signaling parameters outside the approximation regime.
    """
    if n_draws < 10**4:
        raise ValueError(f"n_draws must be >= 1e4, got {n_draws}")
    rng = np.random.default_rng(seed)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        z = _draw_ratio(form, g, p, n_draws, rng)
    finite = np.isfinite(z)
    n_eff = int(finite.sum())
    nonfinite_fraction = 1.0 - n_eff / n_draws
    if nonfinite_fraction > MAX_NONFINITE_FRACTION:
        raise ValueError(
            f"{nonfinite_fraction:.2%} of draws were non-finite "
            f"(> {MAX_NONFINITE_FRACTION:.2%}); parameters are outside the "
            "approximation regime"
        )
    z = z[finite]
    z2 = z**2
    mean = float(z.mean())
    second = float(z2.mean())
    return McRatioResult(
        moments=GaussianMoments(mean=mean, second_moment=second),
        se_mean=float(z.std(ddof=1) / math.sqrt(n_eff)),
        se_second_moment=float(z2.std(ddof=1) / math.sqrt(n_eff)),
        n_effective=n_eff,
        nonfinite_fraction=nonfinite_fraction,
    )


def mc_ratio_oracle(
    form: RatioForm,
    g: GaussianSpec,
    p: RatioParams,
    n_draws: int,
    seed: int,
) -> GaussianMoments:
    """Sample mean and second moment of ``n_draws`` realizations of a form."""
    return mc_ratio_detail(form, g, p, n_draws, seed).moments
