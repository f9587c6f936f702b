"""Held-out scores for mixture predictions."""

from __future__ import annotations

import numpy as np
from scipy.special import logsumexp

from ..gaussmix import GaussianMixture
from ..validation import as_vector


def pointwise_mean_sd(mixture: GaussianMixture) -> tuple[np.ndarray, np.ndarray]:
    """Per-coordinate mean and sd of the mixture's one-dimensional marginals."""
    w = mixture.weights
    means = np.stack([c.mean for c in mixture.components])
    variances = np.stack([np.diag(c.cov) for c in mixture.components])
    mean = w @ means
    second = w @ (variances + means**2)
    var = np.maximum(second - mean**2, 0.0)
    return mean, np.sqrt(var)


def metrics(predictive: GaussianMixture, y_true: np.ndarray) -> dict[str, float]:
    """Root-mean-square error and negative log predictive density.

    Both scores treat each held-out point through the corresponding
    one-dimensional marginal of ``predictive``; nlpd is the mean of the
    per-point negative log densities.
    """
    y = as_vector(y_true, "y_true")
    if predictive.dim != y.shape[0]:
        raise ValueError(f"predictive covers {predictive.dim} points but y_true has {y.shape[0]}")
    mean, _ = pointwise_mean_sd(predictive)
    rmse = float(np.sqrt(np.mean((mean - y) ** 2)))

    log_w = np.log(np.where(predictive.weights > 0.0, predictive.weights, 1.0))
    log_w[predictive.weights == 0.0] = -np.inf
    per_component = np.empty((len(predictive.components), y.shape[0]))
    for i, comp in enumerate(predictive.components):
        var = np.diag(comp.cov)
        per_component[i] = -0.5 * (np.log(2.0 * np.pi * var) + (y - comp.mean) ** 2 / var)
    log_density = logsumexp(log_w[:, None] + per_component, axis=0)
    return {"rmse": rmse, "nlpd": float(-np.mean(log_density))}
