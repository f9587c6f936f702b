"""scikit-learn style estimators wrapping the two models.

Both regressors follow the usual conventions: constructor arguments are
stored verbatim (so ``clone`` and ``get_params``/``set_params`` work),
``fit`` validates inputs and stores learned state in trailing-underscore
attributes, and ``predict`` optionally returns predictive standard
deviations. Components can be given explicitly or as kernel-kind names
("ard_se", "linear", "periodic"), in which case initial hyperparameters
are chosen from the data scales at fit time.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin

from . import exact_mgp, svmgp
from .errors import NotFittedError
from .exact_mgp import MGPComponent, MGPPrior, TrainConfig
from .gaussmix import GaussianMixture
from .kernels import ZeroMean
from .svmgp import SVMGPTrainConfig
from .validation import as_matrix, as_vector, check_matching_rows


def _resolve_components(components, X, y):
    """Accept kernel-kind names, (name, kernel [, weight]) tuples, or MGPComponents."""
    if components is None:
        components = ["ard_se"]
    if all(isinstance(c, str) for c in components):
        return exact_mgp.pooled_prior(components, X, y).components
    out = []
    k = len(components)
    for item in components:
        if isinstance(item, MGPComponent):
            out.append(item)
        else:
            name, kernel, *rest = item
            weight = rest[0] if rest else 1.0 / k
            out.append(MGPComponent(name, kernel, weight, rest[1] if len(rest) > 1 else ZeroMean()))
    return tuple(out)


class ExactMGPRegressor(RegressorMixin, BaseEstimator):
    """Exact regression under a pooled GP prior.

    fit() optimizes all hyperparameters by evidence maximization (unless
    optimize=False) and conditions on the training data; predict() returns
    the mixture predictive mean, with the standard deviation of the noisy
    predictive on request.
    """

    def __init__(
        self,
        components=None,
        noise_variance=None,
        optimize=True,
        max_iter=2000,
        step_size=0.01,
        tol=1e-8,
        patience=20,
        freeze_noise=False,
    ):
        self.components = components
        self.noise_variance = noise_variance
        self.optimize = optimize
        self.max_iter = max_iter
        self.step_size = step_size
        self.tol = tol
        self.patience = patience
        self.freeze_noise = freeze_noise

    def fit(self, X, y):
        X = as_matrix(X)
        y = as_vector(y)
        check_matching_rows(X, y)
        comps = _resolve_components(self.components, X, y)
        s2 = self.noise_variance or exact_mgp.default_noise_variance(y)
        prior = MGPPrior(tuple(comps), s2)
        if self.optimize:
            config = TrainConfig(
                max_iter=self.max_iter,
                step_size=self.step_size,
                tol=self.tol,
                patience=self.patience,
                freeze_noise=self.freeze_noise,
            )
            prior, self.objective_trace_ = exact_mgp.fit(prior, X, y, config)
        else:
            self.objective_trace_ = [exact_mgp.log_marginal_likelihood(prior, X, y)]
        self.prior_ = prior
        self.posterior_ = exact_mgp.condition_on_data(prior, X, y)
        self.posterior_weights_ = self.posterior_.weights
        self.log_marginal_likelihood_ = self.posterior_.log_marginal_likelihood
        self.n_features_in_ = X.shape[1]
        return self

    def _posterior(self):
        if not hasattr(self, "posterior_"):
            raise NotFittedError("this ExactMGPRegressor is not fitted; call fit first")
        return self.posterior_

    def predict(self, X, return_std=False):
        mix = self._posterior().predict_y(as_matrix(X))
        mean, cov = mix.moments()
        if return_std:
            return mean, np.sqrt(np.maximum(np.diag(cov), 0.0))
        return mean

    def predict_mixture(self, X, include_noise=True) -> GaussianMixture:
        post = self._posterior()
        return post.predict_y(X) if include_noise else post.predict_f(X)


class SVMGPRegressor(RegressorMixin, BaseEstimator):
    """Sparse variational regression under a Dirichlet-weighted GP pool."""

    def __init__(
        self,
        components=None,
        alpha=None,
        n_inducing=10,
        noise_variance=None,
        batch_size=256,
        max_epochs=200,
        step_size=0.01,
        seed=0,
    ):
        self.components = components
        self.alpha = alpha
        self.n_inducing = n_inducing
        self.noise_variance = noise_variance
        self.batch_size = batch_size
        self.max_epochs = max_epochs
        self.step_size = step_size
        self.seed = seed

    def fit(self, X, y):
        X = as_matrix(X)
        y = as_vector(y)
        check_matching_rows(X, y)
        comps = _resolve_components(self.components, X, y)
        alpha = np.ones(len(comps)) if self.alpha is None else np.asarray(self.alpha, dtype=float)
        model = svmgp.init_model(
            [(c.mean, c.kernel) for c in comps],
            alpha,
            X,
            y,
            self.n_inducing,
            names=[c.name for c in comps],
            noise_variance=self.noise_variance,
        )
        config = SVMGPTrainConfig(
            batch_size=min(self.batch_size, X.shape[0]),
            max_epochs=self.max_epochs,
            step_size=self.step_size,
            seed=self.seed,
        )
        self.model_, self.elbo_trace_ = svmgp.train(model, X, y, config)
        self.posterior_weights_ = self.model_.weights
        self.n_features_in_ = X.shape[1]
        return self

    def _model(self):
        if not hasattr(self, "model_"):
            raise NotFittedError("this SVMGPRegressor is not fitted; call fit first")
        return self.model_

    def predict(self, X, return_std=False):
        mix = svmgp.predict_y(self._model(), as_matrix(X))
        mean, cov = mix.moments()
        if return_std:
            return mean, np.sqrt(np.maximum(np.diag(cov), 0.0))
        return mean

    def predict_mixture(self, X, include_noise=True) -> GaussianMixture:
        model = self._model()
        return svmgp.predict_y(model, X) if include_noise else svmgp.predict_f(model, X)
