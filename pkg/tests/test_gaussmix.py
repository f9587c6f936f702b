"""Finite-dimensional mixture algebra against quadrature, hand Bayes, and MC."""

import numpy as np
import pytest

from mgp.errors import NumericalDegeneracyError
from mgp.gaussmix import Gaussian, GaussianMixture, mixture_logpdf, mvn_logpdf, weights_from_log
from oracles import condition_gaussian, gauss_logpdf, marginal_density_by_quadrature, mix_logpdf

RNG = np.random.Generator(np.random.Philox(7))


def random_spd(d, rng, scale=1.0):
    A = rng.normal(size=(d, d))
    S = A @ A.T + d * scale * np.eye(d)
    return 0.5 * (S + S.T)


def random_mixture(k, d, rng):
    w = rng.uniform(0.5, 2.0, size=k)
    w /= w.sum()
    comps = tuple(Gaussian(rng.normal(size=d), random_spd(d, rng)) for _ in range(k))
    return GaussianMixture(w, comps)


# ---------------------------------------------------------------------------
# densities

def test_gaussian_logpdf_matches_scipy():
    for d in (1, 3, 5):
        g = Gaussian(RNG.normal(size=d), random_spd(d, RNG))
        x = RNG.normal(size=d)
        assert mvn_logpdf(g, x) == pytest.approx(gauss_logpdf(x, g.mean, g.cov), abs=1e-12)


def test_mixture_logpdf_matches_logsumexp_oracle():
    mix = random_mixture(3, 4, RNG)
    x = RNG.normal(size=4)
    want = mix_logpdf(x, mix.weights, [c.mean for c in mix.components], [c.cov for c in mix.components])
    assert mixture_logpdf(mix, x) == pytest.approx(want, abs=1e-12)


def test_zero_weight_component_is_ignored():
    g1 = Gaussian(np.zeros(2), np.eye(2))
    g2 = Gaussian(np.full(2, 50.0), np.eye(2))
    mix = GaussianMixture(np.array([1.0, 0.0]), (g1, g2))
    x = np.array([0.3, -0.2])
    assert mixture_logpdf(mix, x) == pytest.approx(mvn_logpdf(g1, x), abs=1e-12)


# ---------------------------------------------------------------------------
# marginals: quadrature oracle

def test_marginal_matches_quadrature():
    mix = random_mixture(2, 2, RNG)
    marg = mix.marginalize([0])
    assert np.allclose(marg.weights, mix.weights)
    for x0 in (-1.0, 0.2, 1.7):
        want = marginal_density_by_quadrature(
            mix.weights, [c.mean for c in mix.components], [c.cov for c in mix.components], x0
        )
        got = np.exp(mixture_logpdf(marg, np.array([x0])))
        assert got == pytest.approx(want, abs=1e-6)


def test_marginal_selects_blocks_in_given_order():
    mix = random_mixture(2, 3, RNG)
    marg = mix.marginalize([2, 0])
    for got, src in zip(marg.components, mix.components):
        assert np.allclose(got.mean, src.mean[[2, 0]])
        assert np.allclose(got.cov, src.cov[np.ix_([2, 0], [2, 0])])


# ---------------------------------------------------------------------------
# conditionals: hand-applied Bayes rule

def test_condition_matches_hand_bayes():
    mix = random_mixture(3, 4, RNG)
    observed = [1, 3]
    values = np.array([0.4, -0.9])
    got = mix.condition(observed, values)

    post_logw = []
    for w, comp in zip(mix.weights, mix.components):
        m, S, logdens = condition_gaussian(comp.mean, comp.cov, observed, values)
        post_logw.append(np.log(w) + logdens)
    post_logw = np.array(post_logw)
    want_w = np.exp(post_logw - post_logw.max())
    want_w /= want_w.sum()

    assert np.allclose(got.weights, want_w, atol=1e-10)
    for i, comp in enumerate(mix.components):
        m, S, _ = condition_gaussian(comp.mean, comp.cov, observed, values)
        assert np.allclose(got.components[i].mean, m, atol=1e-10)
        assert np.allclose(got.components[i].cov, S, atol=1e-10)


def test_condition_rejects_observing_everything():
    mix = random_mixture(2, 2, RNG)
    with pytest.raises(ValueError):
        mix.condition([0, 1], np.array([0.0, 0.0]))


def test_condition_reweights_toward_compatible_component():
    near = Gaussian(np.zeros(2), np.eye(2))
    far = Gaussian(np.array([30.0, 0.0]), np.eye(2))
    mix = GaussianMixture(np.array([0.5, 0.5]), (near, far))
    post = mix.condition([0], np.array([0.1]))
    assert post.weights[0] > 1.0 - 1e-10


# ---------------------------------------------------------------------------
# noise addition: algebra plus Monte Carlo

def test_add_diagonal_noise_algebra():
    mix = random_mixture(2, 3, RNG)
    noisy = mix.add_diagonal_noise(0.37)
    for a, b in zip(mix.components, noisy.components):
        assert np.allclose(b.cov, a.cov + 0.37 * np.eye(3), atol=1e-14)
        assert np.allclose(b.mean, a.mean)
    assert np.allclose(noisy.weights, mix.weights)


def test_add_diagonal_noise_matches_monte_carlo():
    n = 100_000
    mix = random_mixture(2, 2, RNG)
    s2 = 0.5
    noisy = mix.add_diagonal_noise(s2)

    draws = mix.sample(n, seed=11)
    eps = np.random.Generator(np.random.Philox(12)).normal(scale=np.sqrt(s2), size=draws.shape)
    sim = draws + eps

    mean, cov = noisy.moments()
    se_mean = np.sqrt(np.diag(cov) / n)
    assert np.all(np.abs(sim.mean(axis=0) - mean) < 5 * se_mean)
    # variance of a sample variance is roughly 2 sigma^4 / n for Gaussian tails;
    # mixtures are heavier, so give the bound the same 5x slack
    emp_var = sim.var(axis=0)
    se_var = np.sqrt(2.0 / n) * np.diag(cov)
    assert np.all(np.abs(emp_var - np.diag(cov)) < 5 * se_var)


# ---------------------------------------------------------------------------
# sampling and moments

def test_sampling_is_deterministic_and_matches_moments():
    mix = random_mixture(3, 2, RNG)
    a = mix.sample(5000, seed=42)
    b = mix.sample(5000, seed=42)
    assert np.array_equal(a, b)
    c = mix.sample(5000, seed=43)
    assert not np.array_equal(a, c)

    mean, cov = mix.moments()
    big = mix.sample(200_000, seed=1)
    assert np.allclose(big.mean(axis=0), mean, atol=5 * np.sqrt(np.max(np.diag(cov)) / 200_000))


def test_moments_against_direct_sum():
    mix = random_mixture(3, 2, RNG)
    mean, cov = mix.moments()
    want_mean = sum(w * c.mean for w, c in zip(mix.weights, mix.components))
    want_cov = sum(
        w * (c.cov + np.outer(c.mean, c.mean)) for w, c in zip(mix.weights, mix.components)
    ) - np.outer(want_mean, want_mean)
    assert np.allclose(mean, want_mean, atol=1e-14)
    assert np.allclose(cov, want_cov, atol=1e-14)


# ---------------------------------------------------------------------------
# log-weight normalization

def test_weights_from_log_normalizes():
    w = weights_from_log(np.log([0.2, 0.3, 0.5]) + 123.0)
    assert np.allclose(w, [0.2, 0.3, 0.5], atol=1e-12)


def test_weights_from_log_clamps_hopeless_components():
    w = weights_from_log(np.array([0.0, -2000.0]))
    assert w[1] == 0.0
    assert w[0] == 1.0


def test_weights_from_log_all_degenerate_raises():
    with pytest.raises(NumericalDegeneracyError):
        weights_from_log(np.array([-np.inf, -np.inf]))


# ---------------------------------------------------------------------------
# validation and serialization

def test_asymmetric_covariance_rejected():
    cov = np.array([[1.0, 0.5], [0.2, 1.0]])
    with pytest.raises(ValueError):
        Gaussian(np.zeros(2), cov)


def test_weights_must_sum_to_one():
    g = Gaussian(np.zeros(1), np.eye(1))
    with pytest.raises(ValueError):
        GaussianMixture(np.array([0.7, 0.7]), (g, g))


def test_mixture_dict_round_trip():
    mix = random_mixture(2, 3, RNG)
    back = GaussianMixture.from_dict(mix.to_dict())
    assert np.allclose(back.weights, mix.weights)
    for a, b in zip(mix.components, back.components):
        assert np.allclose(a.mean, b.mean)
        assert np.allclose(a.cov, b.cov)
