"""Linear discriminant analysis with equal priors, written from scratch.

Classes share one pooled covariance estimate: the within-class scatter
divided by ``N_total - C``, regularized by ``ridge * (trace / K)`` on the
diagonal (plain ``ridge`` when the trace is zero, i.e. all samples are
identical).  A sample is assigned to the class with the largest

    delta_c(x) = x . Sigma^-1 mu_c - 1/2 mu_c . Sigma^-1 mu_c + log prior_c

with ties resolved toward the lowest class index.  Class labels are the
positions of the per-device feature sets passed to `fit` / `accuracy`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = ["LdaModel", "fit", "predict", "predict_batch", "accuracy"]

DEFAULT_RIDGE = 1e-6


@dataclass(frozen=True)
class LdaModel:
    """Fitted discriminant: per-class means, shared precision, priors."""

    class_means: np.ndarray  # (C, K)
    pooled_covariance_inverse: np.ndarray  # (K, K)
    priors: np.ndarray  # (C,), sums to 1

    def __post_init__(self) -> None:
        c, k = self.class_means.shape
        if self.pooled_covariance_inverse.shape != (k, k):
            raise ValueError("precision matrix does not match feature dimension")
        if self.priors.shape != (c,) or not np.isclose(self.priors.sum(), 1.0):
            raise ValueError("priors must be one per class and sum to 1")
        for arr in (self.class_means, self.pooled_covariance_inverse, self.priors):
            arr.flags.writeable = False

    @property
    def n_classes(self) -> int:
        return self.class_means.shape[0]


def _values_of(feature_set) -> np.ndarray:
    return np.asarray(getattr(feature_set, "values", feature_set), dtype=float)


def fit(train: Sequence, ridge: float = DEFAULT_RIDGE) -> LdaModel:
    """Fit the discriminant on per-device training sets (class = position)."""
    if ridge < 0.0:
        raise ValueError(f"ridge must be >= 0, got {ridge}")
    mats = [_values_of(ts) for ts in train]
    if len(mats) < 2:
        raise ValueError("need at least two classes")
    k = mats[0].shape[1]
    if any(m.ndim != 2 or m.shape[1] != k or m.shape[0] < 1 for m in mats):
        raise ValueError("every class needs >= 1 sample of consistent dimension")

    n_total = sum(m.shape[0] for m in mats)
    n_classes = len(mats)
    if n_total <= n_classes:
        raise ValueError("need more samples than classes to pool covariance")

    means = np.stack([m.mean(axis=0) for m in mats])
    scatter = np.zeros((k, k))
    for m, mu in zip(mats, means):
        centered = m - mu
        scatter += centered.T @ centered
    pooled = scatter / (n_total - n_classes)

    trace = float(np.trace(pooled))
    scale = trace / k if trace > 0.0 else 1.0
    regularized = pooled + ridge * scale * np.eye(k)

    eigenvalues = np.linalg.eigvalsh(regularized)
    smallest = float(eigenvalues[0])
    largest = float(eigenvalues[-1])
    # Eigenvalues at rounding-noise scale (exact duplicates of a column land
    # around 1e-17 * largest) mean the matrix is numerically singular even
    # though the computed eigenvalue may be a hair above zero.
    floor = largest * np.finfo(float).eps * k
    if smallest <= floor or not np.isfinite(smallest):
        raise ValueError(
            "pooled covariance is singular after regularization: "
            f"smallest eigenvalue {smallest:.6g}"
        )

    precision = np.linalg.inv(regularized)
    priors = np.full(n_classes, 1.0 / n_classes)
    return LdaModel(
        class_means=means, pooled_covariance_inverse=precision, priors=priors
    )


def predict_batch(model: LdaModel, samples: np.ndarray) -> np.ndarray:
    """Class labels for an (n, K) batch; ties go to the lowest index."""
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 2 or samples.shape[1] != model.class_means.shape[1]:
        raise ValueError(f"expected (n, K) samples, got shape {samples.shape}")
    projected = model.pooled_covariance_inverse @ model.class_means.T  # (K, C)
    offsets = -0.5 * np.einsum(
        "ck,kc->c", model.class_means, projected
    ) + np.log(model.priors)
    scores = samples @ projected + offsets  # (n, C)
    # np.argmax returns the first (lowest-index) maximizer on ties.
    return np.argmax(scores, axis=1)


def predict(model: LdaModel, sample: np.ndarray) -> int:
    """Class label for a single K-vector."""
    sample = np.asarray(sample, dtype=float)
    if sample.ndim != 1:
        raise ValueError(f"expected a single K-vector, got shape {sample.shape}")
    return int(predict_batch(model, sample[None, :])[0])


def accuracy(model: LdaModel, test: Sequence) -> float:
    """Fraction of test samples assigned to their own device (class = position)."""
    mats = [_values_of(ts) for ts in test]
    if len(mats) != model.n_classes:
        raise ValueError("test sets must align with the fitted classes")
    correct = 0
    total = 0
    for label, mat in enumerate(mats):
        predictions = predict_batch(model, mat)
        correct += int((predictions == label).sum())
        total += mat.shape[0]
    if total == 0:
        raise ValueError("no test samples")
    return correct / total
