"""Independent reference implementations the tests check the library against.

Everything here is written the slow, obvious way: dense inverses, textbook
formulas, quadrature, Monte Carlo, finite differences. Nothing reuses the
package's linear algebra; scalar kernel evaluations are recombined from
first principles where a covariance is needed.
"""

import numpy as np
from scipy.integrate import simpson
from scipy.special import gammaln, logsumexp
from scipy.stats import dirichlet as scipy_dirichlet
from scipy.stats import multivariate_normal


# ---------------------------------------------------------------------------
# numerics

def fd_grad(f, x, h=1e-5):
    """Central finite differences, one coordinate at a time."""
    x = np.asarray(x, dtype=float)
    g = np.empty(x.size)
    for j in range(x.size):
        e = np.zeros(x.size)
        e[j] = h
        g[j] = (f(x + e) - f(x - e)) / (2.0 * h)
    return g


def rel_err(analytic, numeric):
    """Worst-coordinate error relative to the scale of the analytic gradient."""
    a = np.asarray(analytic, dtype=float)
    b = np.asarray(numeric, dtype=float)
    return float(np.max(np.abs(a - b)) / max(1.0, float(np.max(np.abs(a)))))


# ---------------------------------------------------------------------------
# Gaussian algebra, textbook form

def gauss_logpdf(x, mean, cov):
    return float(multivariate_normal(mean=mean, cov=cov).logpdf(x))


def mix_logpdf(x, weights, means, covs):
    terms = [
        np.log(w) + gauss_logpdf(x, m, c) if w > 0.0 else -np.inf
        for w, m, c in zip(weights, means, covs)
    ]
    return float(logsumexp(terms))


def condition_gaussian(mean, cov, observed, values):
    """Condition x_kept | x_observed = values by the block formulas.

    Returns (mean, cov, log density of the observed block).
    """
    n = mean.size
    kept = [i for i in range(n) if i not in observed]
    A = np.ix_(kept, kept)
    B = np.ix_(observed, observed)
    AB = np.ix_(kept, observed)
    Sbb_inv = np.linalg.inv(cov[B])
    resid = np.asarray(values) - mean[list(observed)]
    m_post = mean[kept] + cov[AB] @ Sbb_inv @ resid
    S_post = cov[A] - cov[AB] @ Sbb_inv @ cov[AB].T
    return m_post, S_post, gauss_logpdf(values, mean[list(observed)], cov[B])


def marginal_density_by_quadrature(weights, means, covs, x0, n_nodes=2001, half_width=10.0):
    """Density of coordinate 0 of a two-dimensional mixture at x0,
    by integrating the joint density over coordinate 1."""
    lo = min(m[1] - half_width * np.sqrt(c[1, 1]) for m, c in zip(means, covs))
    hi = max(m[1] + half_width * np.sqrt(c[1, 1]) for m, c in zip(means, covs))
    ts = np.linspace(lo, hi, n_nodes)
    vals = np.zeros(n_nodes)
    for w, m, c in zip(weights, means, covs):
        pts = np.column_stack([np.full(n_nodes, x0), ts])
        vals += w * multivariate_normal(mean=m, cov=c).pdf(pts)
    return float(simpson(vals, x=ts))


def kl_gauss(mean0, cov0, mean1, cov1):
    """KL(N(mean0, cov0) || N(mean1, cov1)) by dense inverses and slogdet."""
    d = mean0.size
    inv1 = np.linalg.inv(cov1)
    _, ld0 = np.linalg.slogdet(cov0)
    _, ld1 = np.linalg.slogdet(cov1)
    diff = mean0 - mean1
    return 0.5 * (np.trace(inv1 @ cov0) + diff @ inv1 @ diff - d + ld1 - ld0)


# ---------------------------------------------------------------------------
# GP regression, textbook form

def kernel_matrix(kernel_fn, X1, X2):
    """Double loop over scalar kernel evaluations."""
    K = np.empty((X1.shape[0], X2.shape[0]))
    for i in range(X1.shape[0]):
        for j in range(X2.shape[0]):
            K[i, j] = kernel_fn(X1[i], X2[j])
    return K


def jittered(K_raw, jitter_scale=1e-6):
    return K_raw + jitter_scale * float(np.mean(np.diag(K_raw))) * np.eye(K_raw.shape[0])


def gp_posterior(K, Ks, Kss, y, noise_variance, mean_train=None, mean_test=None):
    """Single-GP posterior over latent values, dense-inverse form."""
    n = K.shape[0]
    mx = np.zeros(n) if mean_train is None else mean_train
    ms = np.zeros(Kss.shape[0]) if mean_test is None else mean_test
    Cinv = np.linalg.inv(K + noise_variance * np.eye(n))
    mean = ms + Ks.T @ Cinv @ (y - mx)
    cov = Kss - Ks.T @ Cinv @ Ks
    return mean, cov


def gp_log_evidence(K, y, noise_variance, mean_train=None):
    n = K.shape[0]
    mx = np.zeros(n) if mean_train is None else mean_train
    return gauss_logpdf(y, mx, K + noise_variance * np.eye(n))


def pooled_log_evidence(weights, Ks_raw, y, noise_variance, means_train=None):
    """Mixture evidence with raw (unjittered) covariances."""
    k = len(weights)
    if means_train is None:
        means_train = [None] * k
    terms = [
        np.log(weights[i]) + gp_log_evidence(Ks_raw[i], y, noise_variance, means_train[i])
        for i in range(k)
    ]
    return float(logsumexp(terms))


# ---------------------------------------------------------------------------
# sparse variational bound, single component, dense-inverse form

def svgp_elbo_single(K_mm, K_mn, kdiag, y, noise_variance, q_mean, q_cov,
                     mean_Z=None, mean_X=None, n_total=None):
    """Evidence bound of one sparse GP with an explicit Gaussian factor.

    ``K_mm`` should already carry whatever diagonal stabilizer the model
    under test uses; ``kdiag`` is the raw prior variance at the inputs.
    """
    m, n = K_mn.shape
    mz = np.zeros(m) if mean_Z is None else mean_Z
    mx = np.zeros(n) if mean_X is None else mean_X
    Kinv = np.linalg.inv(K_mm)
    B = Kinv @ K_mn
    mu = mx + B.T @ (q_mean - mz)
    ktilde = kdiag - np.sum(K_mn * B, axis=0)
    qv = np.sum(B * (q_cov @ B), axis=0)
    s2 = noise_variance
    per_point = -0.5 * np.log(2.0 * np.pi * s2) - ((y - mu) ** 2 + ktilde + qv) / (2.0 * s2)
    scale = 1.0 if n_total is None else n_total / n
    return scale * float(np.sum(per_point)) - kl_gauss(q_mean, q_cov, mz, K_mm)


# ---------------------------------------------------------------------------
# Dirichlet

def dirichlet_kl_closed(alpha_tilde, alpha):
    at = np.asarray(alpha_tilde, dtype=float)
    a = np.asarray(alpha, dtype=float)
    from scipy.special import psi

    at0, a0 = at.sum(), a.sum()
    return float(
        gammaln(at0) - gammaln(a0)
        - np.sum(gammaln(at)) + np.sum(gammaln(a))
        + np.sum((at - a) * (psi(at) - psi(at0)))
    )


def dirichlet_kl_mc(alpha_tilde, alpha, n_samples, seed):
    """Monte Carlo KL estimate with its standard error."""
    rng = np.random.Generator(np.random.Philox(seed))
    W = rng.dirichlet(alpha_tilde, size=n_samples)
    vals = scipy_dirichlet.logpdf(W.T, alpha_tilde) - scipy_dirichlet.logpdf(W.T, alpha)
    return float(np.mean(vals)), float(np.std(vals, ddof=1) / np.sqrt(n_samples))
