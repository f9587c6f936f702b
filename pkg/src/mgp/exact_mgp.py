"""Exact GP regression under a pooled (mixture) prior.

The prior over the latent function is a weighted pool of independent GP
priors, one per component, hence every finite marginal is a Gaussian
mixture with the pooled weights. With a Gaussian likelihood the posterior
is available in closed form: each component is updated by the usual GP
conditioning identities, and the weights are reweighted by the component
evidences. The pooled log evidence

    log p(y) = logsumexp_i [ log w_i + log N(y | m_i(X), K_i + s2 I) ]

is the training objective; its gradient combines the classical
per-component evidence gradient with the component responsibilities.
Pool weights themselves are fixed at model specification time and are
never trained.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import cho_solve, solve_triangular
from scipy.special import logsumexp

from .errors import NumericalDegeneracyError
from .gaussmix import Gaussian, GaussianMixture, weights_from_log
from .kernels import (
    ARDSEKernel,
    GramOptions,
    Kernel,
    LinearKernel,
    MeanFunction,
    PeriodicKernel,
    ZeroMean,
    cross_gram,
    gram,
    jittered_param_grads,
)
from .optim import maximize_monotone
from .validation import as_matrix, as_positive_float, as_vector, check_input_dim, check_matching_rows, readonly

LOG2PI = np.log(2.0 * np.pi)


@dataclass(frozen=True)
class MGPComponent:
    """One GP prior in the pool: a name, a mean, a kernel, and a pool weight."""

    name: str
    kernel: Kernel
    weight: float
    mean: MeanFunction = ZeroMean()

    def __post_init__(self):
        if not self.name:
            raise ValueError("component name must be non-empty")
        w = float(self.weight)
        if not np.isfinite(w) or w < 0:
            raise ValueError(f"component weight must be nonnegative, got {self.weight!r}")
        object.__setattr__(self, "weight", w)


@dataclass(frozen=True)
class MGPPrior:
    """Pooled GP prior plus a shared Gaussian observation noise variance."""

    components: tuple[MGPComponent, ...]
    noise_variance: float
    gram_opts: GramOptions = GramOptions()

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise ValueError("prior needs at least one component")
        names = [c.name for c in comps]
        if len(set(names)) != len(names):
            raise ValueError(f"component names must be unique, got {names}")
        total = sum(c.weight for c in comps)
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"pool weights must sum to 1, got {total!r}")
        dims = {c.kernel.input_dim for c in comps} | {getattr(c.mean, "input_dim", None) for c in comps}
        dims.discard(None)
        if len(dims) > 1:
            raise ValueError(f"components disagree on input dimension: {sorted(dims)}")
        object.__setattr__(self, "components", comps)
        object.__setattr__(
            self, "noise_variance", as_positive_float(self.noise_variance, "noise_variance")
        )

    @property
    def weights(self) -> np.ndarray:
        return np.array([c.weight for c in self.components])

    @property
    def input_dim(self) -> int | None:
        for c in self.components:
            if c.kernel.input_dim is not None:
                return c.kernel.input_dim
            if getattr(c.mean, "input_dim", None) is not None:
                return c.mean.input_dim
        return None

    @property
    def n_components(self) -> int:
        return len(self.components)


@dataclass(frozen=True)
class TrainConfig:
    """Settings for hyperparameter fitting by guarded adaptive ascent."""

    max_iter: int = 2000
    step_size: float = 0.01
    tol: float = 1e-8
    patience: int = 20
    freeze_noise: bool = False

    def __post_init__(self):
        if self.max_iter < 0:
            raise ValueError("max_iter must be nonnegative")
        as_positive_float(self.step_size, "step_size")
        as_positive_float(self.tol, "tol")
        if self.patience < 1:
            raise ValueError("patience must be at least 1")


# ---------------------------------------------------------------------------
# unconstrained parameter vector

def prior_param_names(prior: MGPPrior) -> list[str]:
    """Names for the packed unconstrained parameter vector, in pack order."""
    names: list[str] = []
    for c in prior.components:
        names += [f"{c.name}.kernel.{p}" for p in c.kernel.param_names]
        names += [f"{c.name}.mean.{p}" for p in c.mean.param_names]
    names.append("log_noise_variance")
    return names


def prior_theta(prior: MGPPrior) -> np.ndarray:
    """Pack all trainable hyperparameters: per component its kernel params
    (log domain) then its mean params, followed by the shared log noise."""
    parts = []
    for c in prior.components:
        parts.append(c.kernel.theta)
        parts.append(c.mean.theta)
    parts.append([np.log(prior.noise_variance)])
    return np.concatenate(parts)


def prior_with_theta(prior: MGPPrior, theta) -> MGPPrior:
    t = as_vector(theta, "theta", require_finite=False)
    comps = []
    at = 0
    for c in prior.components:
        nk = len(c.kernel.param_names)
        kernel = c.kernel.with_theta(t[at : at + nk])
        at += nk
        nm = len(c.mean.param_names)
        mean = c.mean.with_theta(t[at : at + nm])
        at += nm
        comps.append(replace(c, kernel=kernel, mean=mean))
    if at + 1 != t.shape[0]:
        raise ValueError(f"parameter vector has {t.shape[0]} entries, expected {at + 1}")
    return replace(prior, components=tuple(comps), noise_variance=float(np.exp(t[at])))


# ---------------------------------------------------------------------------
# evidence and gradient

def _validated_data(prior: MGPPrior, X, y):
    X = as_matrix(X)
    y = as_vector(y)
    check_matching_rows(X, y)
    check_input_dim(prior.input_dim, X, "prior")
    return X, y


def _component_solve(comp: MGPComponent, s2: float, opts: GramOptions, X, y):
    """Cholesky of K_i + s2 I, the residual y - m_i(X), and the log evidence."""
    n = X.shape[0]
    C = gram(comp.kernel, X, opts) + s2 * np.eye(n)
    try:
        L = np.linalg.cholesky(C)
    except np.linalg.LinAlgError:
        raise NumericalDegeneracyError(
            f"component {comp.name!r}: noisy Gram matrix is not positive definite"
        ) from None
    resid = y - comp.mean(X)
    z = solve_triangular(L, resid, lower=True)
    with np.errstate(over="ignore"):  # extreme targets overflow to -inf, handled below
        logev = float(-0.5 * n * LOG2PI - np.sum(np.log(np.diag(L))) - 0.5 * z @ z)
    if np.isnan(logev) or logev == np.inf:
        raise NumericalDegeneracyError(
            f"component {comp.name!r} produced a non-finite log evidence"
        )
    return L, resid, logev


def _evidence_terms(prior: MGPPrior, X, y):
    solves = [_component_solve(c, prior.noise_variance, prior.gram_opts, X, y) for c in prior.components]
    with np.errstate(divide="ignore"):
        logw = np.log(prior.weights)
    log_joint = logw + np.array([s[2] for s in solves])
    return solves, log_joint


def log_marginal_likelihood(prior: MGPPrior, X, y) -> float:
    """Pooled log evidence of the targets under the mixture prior."""
    X, y = _validated_data(prior, X, y)
    _, log_joint = _evidence_terms(prior, X, y)
    return float(logsumexp(log_joint))


def _value_and_grad(prior: MGPPrior, X, y):
    solves, log_joint = _evidence_terms(prior, X, y)
    value = float(logsumexp(log_joint))
    if value == -np.inf:
        raise NumericalDegeneracyError("every component assigns zero evidence to the data")
    resp = np.exp(log_joint - value)  # responsibilities
    n = X.shape[0]
    s2 = prior.noise_variance
    eye = np.eye(n)
    grad_parts = []
    grad_noise = 0.0
    for comp, (L, resid, _), r in zip(prior.components, solves, resp):
        alpha = cho_solve((L, True), resid)
        if r == 0.0:
            # a fully dominated component contributes nothing
            zeros = np.zeros(len(comp.kernel.param_names) + len(comp.mean.param_names))
            grad_parts.append(zeros)
            continue
        Cinv = cho_solve((L, True), eye)
        gk = []
        for dC in jittered_param_grads(comp.kernel, X, prior.gram_opts):
            gk.append(0.5 * (alpha @ dC @ alpha - np.sum(Cinv * dC)))
        gm = [float(alpha @ dm) for dm in comp.mean.param_grads(X)]
        grad_parts.append(r * np.array(gk + gm))
        grad_noise += r * 0.5 * s2 * (alpha @ alpha - np.trace(Cinv))
    grad = np.concatenate(grad_parts + [[grad_noise]])
    return value, grad


def log_marginal_likelihood_grad(prior: MGPPrior, X, y) -> np.ndarray:
    """Gradient of the pooled log evidence over the packed parameter vector."""
    X, y = _validated_data(prior, X, y)
    return _value_and_grad(prior, X, y)[1]


def fit(prior: MGPPrior, X, y, config: TrainConfig = TrainConfig()) -> tuple[MGPPrior, list[float]]:
    """Maximize the pooled log evidence over all hyperparameters.

    Guarded adaptive ascent: proposals that would lower the objective are
    rejected, so the returned trace of accepted values never decreases.
    Pool weights stay fixed. Returns (fitted prior, objective trace).
    """
    X, y = _validated_data(prior, X, y)

    first_call = True

    def objective(theta):
        nonlocal first_call
        initial = first_call
        first_call = False
        try:
            value, grad = _value_and_grad(prior_with_theta(prior, theta), X, y)
        except NumericalDegeneracyError:
            if initial:
                raise
            return -np.inf, np.zeros_like(theta)  # reject the proposal
        if config.freeze_noise:
            grad = grad.copy()
            grad[-1] = 0.0
        return value, grad

    theta, trace = maximize_monotone(
        objective,
        prior_theta(prior),
        max_iter=config.max_iter,
        step_size=config.step_size,
        tol=config.tol,
        patience=config.patience,
        what="log marginal likelihood",
    )
    return prior_with_theta(prior, theta), trace


# ---------------------------------------------------------------------------
# posterior

class ExactMGPPosterior:
    """Closed-form posterior: reweighted pool of conditioned GPs.

    Holds the training data and one Cholesky factorization of
    K_i + s2 I per component so that predictions are solves, not refits.
    """

    def __init__(self, prior: MGPPrior, X, y):
        X, y = _validated_data(prior, X, y)
        solves, log_joint = _evidence_terms(prior, X, y)
        self.prior = prior
        self.X = readonly(X)
        self.y = readonly(y)
        self._chols = tuple(s[0] for s in solves)
        self._alphas = tuple(cho_solve((s[0], True), s[1]) for s in solves)
        self.component_log_evidence = readonly(np.array([s[2] for s in solves]))
        self.log_marginal_likelihood = float(logsumexp(log_joint))
        self.weights = readonly(weights_from_log(log_joint))

    @property
    def n_components(self) -> int:
        return self.prior.n_components

    def _check_test_inputs(self, Xs) -> np.ndarray:
        Xs = as_matrix(Xs, "X*")
        if Xs.shape[1] != self.X.shape[1]:
            raise ValueError(
                f"X* has {Xs.shape[1]} columns but the model was conditioned on "
                f"{self.X.shape[1]}-dimensional inputs"
            )
        return Xs

    def predict_f(self, Xs) -> GaussianMixture:
        """Posterior mixture over latent function values at the test inputs."""
        Xs = self._check_test_inputs(Xs)
        comps = []
        for comp, L, alpha in zip(self.prior.components, self._chols, self._alphas):
            Ks = cross_gram(comp.kernel, self.X, Xs)
            Kss = gram(comp.kernel, Xs, self.prior.gram_opts)
            mean = comp.mean(Xs) + Ks.T @ alpha
            V = solve_triangular(L, Ks, lower=True)
            cov = Kss - V.T @ V
            comps.append(Gaussian(mean, 0.5 * (cov + cov.T)))
        return GaussianMixture(self.weights, tuple(comps))

    def predict_y(self, Xs) -> GaussianMixture:
        """Posterior predictive over noisy observations at the test inputs."""
        return self.predict_f(Xs).add_diagonal_noise(self.prior.noise_variance)


def condition_on_data(prior: MGPPrior, X, y) -> ExactMGPPosterior:
    """Condition the pooled prior on observed targets."""
    return ExactMGPPosterior(prior, X, y)


# ---------------------------------------------------------------------------
# data-driven initial hyperparameters

def default_noise_variance(y) -> float:
    y = as_vector(y)
    return max(0.1 * float(np.var(y)), 1e-8)


def heuristic_kernel(kind: str, X, y) -> Kernel:
    """Reasonable starting hyperparameters for a kernel family, from data scales."""
    X = as_matrix(X)
    y = as_vector(y)
    sy = max(float(np.var(y)), 1e-8)
    if kind == "ard_se":
        ls = np.std(X, axis=0)
        ls[ls <= 0] = 1.0
        return ARDSEKernel(sy, tuple(ls))
    if kind == "linear":
        msq = max(float(np.mean(np.sum(X * X, axis=1))), 1e-8)
        return LinearKernel(max(0.1 * sy, 1e-8), sy / msq)
    if kind == "periodic":
        if X.shape[1] != 1:
            raise ValueError("periodic kernel requires 1-d inputs")
        span = float(X.max() - X.min()) or 1.0
        return PeriodicKernel(sy, 1.0, 0.5 * span)
    raise ValueError(f"unknown kernel kind {kind!r}")


def pooled_prior(kinds, X, y, weights=None, noise_variance=None) -> MGPPrior:
    """Build a pool from kernel-kind names with heuristic initial parameters."""
    kinds = list(kinds)
    if weights is None:
        weights = [1.0 / len(kinds)] * len(kinds)
    if len(weights) != len(kinds):
        raise ValueError(f"{len(weights)} weights for {len(kinds)} kernel kinds")
    names = [k if kinds.count(k) == 1 else f"{k}{i + 1}" for i, k in enumerate(kinds)]
    comps = tuple(
        MGPComponent(name, heuristic_kernel(kind, X, y), w)
        for name, kind, w in zip(names, kinds, weights)
    )
    s2 = default_noise_variance(y) if noise_variance is None else noise_variance
    return MGPPrior(comps, s2)
