"""Closed-form pooled model: evidence, gradients, fitting, prediction."""

import numpy as np
import pytest

from mgp.errors import NumericalDegeneracyError
from mgp.exact_mgp import (
    MGPComponent,
    MGPPrior,
    TrainConfig,
    condition_on_data,
    fit,
    log_marginal_likelihood,
    log_marginal_likelihood_grad,
    pooled_prior,
    prior_theta,
    prior_with_theta,
)
from mgp.gaussmix import Gaussian, GaussianMixture, mixture_logpdf
from mgp.kernels import ARDSEKernel, ConstantMean, LinearKernel, LinearMean, PeriodicKernel, gram
from mgp.model_io import load_model, save_exact_model
from oracles import fd_grad, gauss_logpdf, gp_posterior, jittered, kernel_matrix, rel_err

RNG = np.random.Generator(np.random.Philox(99))


def toy_data(n=14, d=1, seed=5):
    rng = np.random.Generator(np.random.Philox(seed))
    X = rng.uniform(-3, 3, size=(n, d))
    y = np.sin(X[:, 0]) + 0.1 * rng.standard_normal(n)
    return X, y


def two_component_prior():
    return MGPPrior(
        components=(
            MGPComponent("se", ARDSEKernel(1.2, (0.9,)), 0.6, ConstantMean(0.2)),
            MGPComponent("lin", LinearKernel(0.3, 0.8), 0.4, LinearMean((0.5,), -0.1)),
        ),
        noise_variance=0.05,
    )


# ---------------------------------------------------------------------------
# evidence

def test_log_marginal_likelihood_matches_mixture_density():
    X, y = toy_data()
    prior = two_component_prior()
    comps = tuple(
        Gaussian(c.mean(X), gram(c.kernel, X, prior.gram_opts))
        for c in prior.components
    )
    mix = GaussianMixture(np.array([0.6, 0.4]), comps).add_diagonal_noise(prior.noise_variance)
    assert log_marginal_likelihood(prior, X, y) == pytest.approx(mixture_logpdf(mix, y), abs=1e-12)


def test_single_component_evidence_is_gaussian_logpdf():
    X, y = toy_data()
    kernel = ARDSEKernel(1.1, (0.7,))
    prior = MGPPrior((MGPComponent("se", kernel, 1.0),), 0.04)
    K = jittered(kernel_matrix(lambda a, b: 1.1 * np.exp(-0.5 * np.sum((a - b) ** 2) / 0.49), X, X))
    want = gauss_logpdf(y, np.zeros(len(y)), K + 0.04 * np.eye(len(y)))
    assert log_marginal_likelihood(prior, X, y) == pytest.approx(want, abs=1e-10)


# ---------------------------------------------------------------------------
# gradients

def test_single_component_gradient_matches_classical_formula():
    X, y = toy_data()
    kernel = ARDSEKernel(1.3, (0.8,))
    prior = MGPPrior((MGPComponent("se", kernel, 1.0),), 0.06)
    grad = log_marginal_likelihood_grad(prior, X, y)

    from mgp.kernels import jittered_param_grads

    C = gram(kernel, X, prior.gram_opts) + 0.06 * np.eye(len(y))
    Cinv = np.linalg.inv(C)
    alpha = Cinv @ y
    for j, dK in enumerate(jittered_param_grads(kernel, X, prior.gram_opts)):
        want = 0.5 * (alpha @ dK @ alpha - np.trace(Cinv @ dK))
        assert grad[j] == pytest.approx(want, rel=1e-9, abs=1e-11)
    want_noise = 0.06 * 0.5 * (alpha @ alpha - np.trace(Cinv))
    assert grad[-1] == pytest.approx(want_noise, rel=1e-9, abs=1e-11)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_pool_gradient_matches_finite_differences(seed):
    rng = np.random.Generator(np.random.Philox(seed))
    X = rng.uniform(-2.5, 2.5, size=(10, 1))
    y = np.sin(2.0 * X[:, 0]) + 0.2 * rng.standard_normal(10)
    prior = MGPPrior(
        components=(
            MGPComponent("se", ARDSEKernel(np.exp(rng.normal()), (np.exp(rng.normal()),)), 0.3, ConstantMean(rng.normal())),
            MGPComponent("per", PeriodicKernel(0.9, 0.7, 2.8), 0.3),
            MGPComponent("lin", LinearKernel(0.4, 0.9), 0.4, LinearMean((0.3,), 0.2)),
        ),
        noise_variance=0.07,
    )
    grad = log_marginal_likelihood_grad(prior, X, y)
    num = fd_grad(lambda t: log_marginal_likelihood(prior_with_theta(prior, t), X, y), prior_theta(prior))
    assert rel_err(grad, num) < 1e-6


# ---------------------------------------------------------------------------
# fitting

def test_fit_trace_is_monotone_and_improves():
    X, y = toy_data(n=20)
    prior = two_component_prior()
    fitted, trace = fit(prior, X, y, TrainConfig(max_iter=150, step_size=0.05))
    assert np.all(np.diff(np.array(trace)) >= 0.0)
    assert trace[-1] > trace[0]
    assert log_marginal_likelihood(fitted, X, y) == pytest.approx(trace[-1], abs=1e-9)


def test_fit_zero_iterations_is_identity():
    X, y = toy_data()
    prior = two_component_prior()
    fitted, trace = fit(prior, X, y, TrainConfig(max_iter=0))
    assert np.array_equal(prior_theta(fitted), prior_theta(prior))
    assert len(trace) == 1


def test_fit_freeze_noise_keeps_noise_variance():
    X, y = toy_data()
    prior = two_component_prior()
    fitted, _ = fit(prior, X, y, TrainConfig(max_iter=40, freeze_noise=True))
    assert fitted.noise_variance == pytest.approx(prior.noise_variance, rel=1e-15)
    moved, _ = fit(prior, X, y, TrainConfig(max_iter=40))
    assert moved.noise_variance != pytest.approx(prior.noise_variance, rel=1e-6)


def test_posterior_weights_concentrate_on_linear_truth():
    rng = np.random.Generator(np.random.Philox(3))
    X = rng.uniform(-4, 4, size=(60, 1))
    y = 1.5 * X[:, 0] - 0.7 + 0.1 * rng.standard_normal(60)
    prior = pooled_prior(["linear", "periodic"], X, y)
    post = condition_on_data(prior, X, y)
    assert post.weights[0] > 0.99


# ---------------------------------------------------------------------------
# prediction

def test_predict_f_matches_textbook_single_gp():
    X, y = toy_data(n=12)
    Xs = np.linspace(-3, 3, 9)[:, None]
    kernel = ARDSEKernel(1.4, (0.8,))
    mean = ConstantMean(0.3)
    prior = MGPPrior((MGPComponent("se", kernel, 1.0, mean),), 0.05)
    post = condition_on_data(prior, X, y).predict_f(Xs)

    def k(a, b):
        return 1.4 * np.exp(-0.5 * np.sum((a - b) ** 2) / 0.64)

    K = jittered(kernel_matrix(k, X, X))
    Ks = kernel_matrix(k, X, Xs)
    Kss = jittered(kernel_matrix(k, Xs, Xs))
    want_mean, want_cov = gp_posterior(
        K, Ks, Kss, y, 0.05, mean_train=np.full(12, 0.3), mean_test=np.full(9, 0.3)
    )
    assert np.max(np.abs(post.components[0].mean - want_mean)) < 1e-10
    assert np.max(np.abs(post.components[0].cov - want_cov)) < 1e-10


def test_predict_f_agrees_with_joint_conditioning():
    # build the joint prior mixture over (y at X, f at X*) and condition on y;
    # the result must match the streamlined posterior arithmetic
    X, y = toy_data(n=7)
    Xs = np.array([[-1.3], [0.4], [2.2]])
    prior = two_component_prior()
    post = condition_on_data(prior, X, y).predict_f(Xs)

    n, m = len(y), len(Xs)
    joint_comps = []
    for c in prior.components:
        both = np.vstack([X, Xs])
        mean = c.mean(both)
        cov = np.zeros((n + m, n + m))
        cov[:n, :n] = gram(c.kernel, X, prior.gram_opts) + prior.noise_variance * np.eye(n)
        cov[n:, n:] = gram(c.kernel, Xs, prior.gram_opts)
        from mgp.kernels import cross_gram

        cov[:n, n:] = cross_gram(c.kernel, X, Xs)
        cov[n:, :n] = cov[:n, n:].T
        joint_comps.append(Gaussian(mean, cov))
    joint = GaussianMixture(np.array([c.weight for c in prior.components]), tuple(joint_comps))
    conditioned = joint.condition(list(range(n)), y)

    assert np.allclose(conditioned.weights, post.weights, atol=1e-10)
    for a, b in zip(conditioned.components, post.components):
        assert np.allclose(a.mean, b.mean, atol=1e-8)
        assert np.allclose(a.cov, b.cov, atol=1e-8)


def test_predict_interpolates_training_data_when_noise_is_tiny():
    # well-separated inputs and a jitter well below the noise floor, so the
    # posterior mean must pass through the observations
    from mgp.kernels import GramOptions

    X = np.linspace(-3, 3, 8)[:, None]
    y = np.sin(X[:, 0])
    prior = MGPPrior(
        (MGPComponent("se", ARDSEKernel(1.0, (1.0,)), 1.0),),
        1e-10,
        gram_opts=GramOptions(jitter_scale=1e-12),
    )
    post = condition_on_data(prior, X, y)
    mean, _ = post.predict_f(X).moments()
    assert np.max(np.abs(mean - y)) < 1e-3


def test_predict_y_adds_noise_to_diagonal():
    X, y = toy_data()
    Xs = np.array([[0.0], [1.0]])
    post = condition_on_data(two_component_prior(), X, y)
    f = post.predict_f(Xs)
    obs = post.predict_y(Xs)
    for a, b in zip(f.components, obs.components):
        assert np.allclose(b.cov, a.cov + 0.05 * np.eye(2), atol=1e-14)


def test_predict_validates_input_dim():
    X, y = toy_data()
    post = condition_on_data(two_component_prior(), X, y)
    with pytest.raises(ValueError):
        post.predict_f(np.zeros((3, 2)))


# ---------------------------------------------------------------------------
# persistence

def test_exact_model_round_trips_through_file(tmp_path):
    X, y = toy_data()
    prior = two_component_prior()
    post = condition_on_data(prior, X, y)
    path = tmp_path / "model.json"
    save_exact_model(path, post)
    kind, loaded_prior, doc = load_model(path)
    assert kind == "exact"
    back = condition_on_data(loaded_prior, X, y)
    assert back.log_marginal_likelihood == pytest.approx(post.log_marginal_likelihood, abs=1e-12)
    Xs = np.array([[0.3], [-2.0]])
    a, _ = post.predict_y(Xs).moments()
    b, _ = back.predict_y(Xs).moments()
    assert np.allclose(a, b, atol=1e-12)
    assert doc["posterior_weights"] == pytest.approx(list(post.weights))


# ---------------------------------------------------------------------------
# validation and degeneracy

def test_prior_validation():
    c = MGPComponent("se", ARDSEKernel(1.0, (1.0,)), 0.5)
    with pytest.raises(ValueError):
        MGPPrior((c, c), 0.1)  # duplicate names
    with pytest.raises(ValueError):
        MGPPrior((MGPComponent("a", ARDSEKernel(1.0, (1.0,)), 0.7),), 0.1)  # weights must sum to 1
    with pytest.raises(ValueError):
        MGPPrior(
            (
                MGPComponent("a", ARDSEKernel(1.0, (1.0,)), 0.5),
                MGPComponent("b", ARDSEKernel(1.0, (1.0, 1.0)), 0.5),
            ),
            0.1,
        )  # inconsistent input dims


def test_degenerate_targets_raise():
    X, _ = toy_data()
    y = np.full(len(X), 1e200)
    prior = two_component_prior()
    with pytest.raises(NumericalDegeneracyError):
        condition_on_data(prior, X, y)
