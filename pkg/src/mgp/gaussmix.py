"""Finite-dimensional Gaussian mixtures and their closure operations.

A mixture with fixed weights is closed under the three operations a
regression model needs: coordinate marginalization, conditioning on a
subset of coordinates (which reweights the components by their density
on the observed block), and adding independent diagonal Gaussian noise.
Everything here is a pure value; operations return new objects.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg import solve_triangular
from scipy.special import logsumexp

from .errors import NumericalDegeneracyError
from .validation import as_index_list, as_positive_float, as_vector, readonly

_LOG_TINY = -745.0  # exp() underflows to subnormals below this


def weights_from_log(logw: np.ndarray) -> np.ndarray:
    """Normalized weights from unnormalized log weights.

    Components whose normalized log weight falls below the subnormal
    threshold are reported as exactly zero rather than denormal.
    """
    total = logsumexp(logw)
    if not np.isfinite(total):
        raise NumericalDegeneracyError(
            "every mixture component has zero density on the conditioning values"
        )
    logw = logw - total
    w = np.where(logw >= _LOG_TINY, np.exp(logw), 0.0)
    return w / w.sum()


@dataclass(frozen=True, eq=False)
class Gaussian:
    """Multivariate normal with an eagerly validated, lazily factorized covariance."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = readonly(as_vector(self.mean, "mean"))
        cov = np.asarray(self.cov, dtype=float)
        n = mean.shape[0]
        if cov.shape != (n, n):
            raise ValueError(f"covariance shape {cov.shape} does not match dimension {n}")
        if not np.isfinite(cov).all():
            raise ValueError("covariance contains NaN or Inf entries")
        scale = max(1.0, float(np.abs(cov).max()))
        if np.abs(cov - cov.T).max() > 1e-12 * scale:
            raise ValueError("covariance is not symmetric")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", readonly(cov))

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    @cached_property
    def chol(self) -> np.ndarray:
        """Lower Cholesky factor of the covariance (cached on first use)."""
        try:
            return np.linalg.cholesky(self.cov)
        except np.linalg.LinAlgError:
            raise NumericalDegeneracyError(
                f"{self.dim}-dimensional covariance is not positive definite"
            ) from None

    def logpdf(self, x) -> float:
        x = as_vector(x, "x")
        if x.shape[0] != self.dim:
            raise ValueError(f"x has dimension {x.shape[0]}, distribution has {self.dim}")
        L = self.chol
        z = solve_triangular(L, x - self.mean, lower=True)
        return float(
            -0.5 * self.dim * np.log(2.0 * np.pi)
            - np.sum(np.log(np.diag(L)))
            - 0.5 * z @ z
        )

    def marginal(self, keep: list[int]) -> "Gaussian":
        return Gaussian(self.mean[keep], self.cov[np.ix_(keep, keep)])

    def _condition(self, observed: list[int], kept: list[int], values: np.ndarray):
        """Conditional on the kept block plus the log density of the observed block."""
        SB = self.cov[np.ix_(observed, observed)]
        SAB = self.cov[np.ix_(observed, kept)]  # |B| x |A|
        resid = values - self.mean[observed]
        try:
            LB = np.linalg.cholesky(SB)
        except np.linalg.LinAlgError:
            raise NumericalDegeneracyError(
                "observed block of a component covariance is not positive definite"
            ) from None
        V = solve_triangular(LB, SAB, lower=True)
        z = solve_triangular(LB, resid, lower=True)
        log_density = float(
            -0.5 * len(observed) * np.log(2.0 * np.pi)
            - np.sum(np.log(np.diag(LB)))
            - 0.5 * z @ z
        )
        mean = self.mean[kept] + V.T @ z
        cov = self.cov[np.ix_(kept, kept)] - V.T @ V
        cov = 0.5 * (cov + cov.T)
        return Gaussian(mean, cov), log_density

    def add_diagonal_noise(self, noise_variance: float) -> "Gaussian":
        s2 = as_positive_float(noise_variance, "noise_variance")
        return Gaussian(self.mean, self.cov + s2 * np.eye(self.dim))


def mvn_logpdf(dist: Gaussian, x) -> float:
    """Log density of a multivariate normal at ``x``."""
    return dist.logpdf(x)


@dataclass(frozen=True, eq=False)
class GaussianMixture:
    """Fixed-weight mixture of equal-dimension Gaussians."""

    weights: np.ndarray
    components: tuple[Gaussian, ...]

    def __post_init__(self):
        w = readonly(as_vector(self.weights, "weights"))
        comps = tuple(self.components)
        if len(comps) == 0:
            raise ValueError("mixture needs at least one component")
        if w.shape[0] != len(comps):
            raise ValueError(f"{w.shape[0]} weights for {len(comps)} components")
        if np.any(w < 0):
            raise ValueError("mixture weights must be nonnegative")
        if abs(w.sum() - 1.0) > 1e-10:
            raise ValueError(f"mixture weights must sum to 1, got {w.sum()!r}")
        dims = {c.dim for c in comps}
        if len(dims) != 1:
            raise ValueError(f"components disagree on dimension: {sorted(dims)}")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "components", comps)

    @property
    def dim(self) -> int:
        return self.components[0].dim

    @property
    def n_components(self) -> int:
        return len(self.components)

    def logpdf(self, x) -> float:
        with np.errstate(divide="ignore"):
            logw = np.log(self.weights)
        vals = np.array([c.logpdf(x) for c in self.components])
        return float(logsumexp(logw + vals))

    def marginalize(self, keep) -> "GaussianMixture":
        """Restrict to a coordinate subset; weights are unchanged."""
        kept = as_index_list(keep, self.dim, "keep")
        return GaussianMixture(self.weights, tuple(c.marginal(kept) for c in self.components))

    def condition(self, observed, values) -> "GaussianMixture":
        """Condition on observed coordinates taking the given values.

        Each component is replaced by its Gaussian conditional and the
        weights are reweighted by the component densities of the observed
        block (computed in log space). Raises when every component assigns
        zero density to the observed values, or when the observed block of
        some component covariance cannot be factorized.
        """
        obs = as_index_list(observed, self.dim, "observed")
        vals = as_vector(values, "values")
        if len(obs) != vals.shape[0]:
            raise ValueError(f"{len(obs)} observed indices but {vals.shape[0]} values")
        if len(obs) == self.dim:
            raise ValueError("cannot condition on every coordinate")
        kept = [i for i in range(self.dim) if i not in set(obs)]
        conds, log_dens = zip(*(c._condition(obs, kept, vals) for c in self.components))
        with np.errstate(divide="ignore"):
            logw = np.log(self.weights) + np.array(log_dens)
        return GaussianMixture(weights_from_log(logw), conds)

    def add_diagonal_noise(self, noise_variance: float) -> "GaussianMixture":
        """Distribution of x + e with e ~ N(0, s2 I) independent of x."""
        return GaussianMixture(
            self.weights,
            tuple(c.add_diagonal_noise(noise_variance) for c in self.components),
        )

    def sample(self, count: int, seed: int) -> np.ndarray:
        """Draw ``count`` rows; component choice then a Gaussian draw, per row.

        Deterministic for a given (seed, count): a counter-based Philox
        generator is created locally and consumed in a fixed order.
        """
        count = int(count)
        if count < 0:
            raise ValueError("count must be nonnegative")
        rng = np.random.Generator(np.random.Philox(int(seed)))
        idx = rng.choice(self.n_components, size=count, p=self.weights)
        z = rng.standard_normal((count, self.dim))
        out = np.empty((count, self.dim))
        for i, comp in enumerate(self.components):
            rows = idx == i
            if rows.any():
                out[rows] = comp.mean + z[rows] @ comp.chol.T
        return out

    def moments(self) -> tuple[np.ndarray, np.ndarray]:
        """Exact mixture mean and covariance."""
        w = self.weights
        means = np.stack([c.mean for c in self.components])
        mean = w @ means
        cov = -np.outer(mean, mean)
        for wi, c in zip(w, self.components):
            cov += wi * (c.cov + np.outer(c.mean, c.mean))
        return mean, 0.5 * (cov + cov.T)

    # fixtures / snapshots

    def to_dict(self) -> dict:
        return {
            "weights": self.weights.tolist(),
            "means": [c.mean.tolist() for c in self.components],
            "covariances": [c.cov.tolist() for c in self.components],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GaussianMixture":
        comps = tuple(
            Gaussian(np.asarray(m), np.asarray(C))
            for m, C in zip(d["means"], d["covariances"])
        )
        return cls(np.asarray(d["weights"]), comps)


def mixture_logpdf(mix: GaussianMixture, x) -> float:
    """Log density of a Gaussian mixture at ``x``."""
    return mix.logpdf(x)
