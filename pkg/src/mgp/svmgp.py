"""Sparse variational inference for the pooled-GP model.

Instead of fixing the pool weights, they get a Dirichlet prior Dir(alpha)
and a variational Dirichlet posterior Dir(alpha_tilde). Each component
carries its own inducing inputs Z_i and a Gaussian variational factor
q(f_i at Z_i) = N(q_mean_i, S_i), S_i = L_i L_i^T with L_i lower
triangular. Writing pit = alpha_tilde / sum(alpha_tilde) for the
variational mean weights, the bound on the log evidence is

    ELBO = (n / |B|) * sum_{j in B} sum_i pit_i * t_ij
           - sum_i KL(q(f_i at Z_i) || p(f_i at Z_i))
           - KL(Dir(alpha_tilde) || Dir(alpha)),

    t_ij = log N(y_j | mu_ij, s2) - ktilde_ij / (2 s2)
           - beta_ij^T S_i beta_ij / (2 s2),

with beta_ij = K_i(Z_i, Z_i)^-1 k_i(Z_i, x_j), the predictive-style mean
mu_ij = m_i(x_j) + beta_ij^T (q_mean_i - m_i(Z_i)), and the conditional
variance ktilde_ij = k_i(x_j, x_j) - k_i(x_j, Z_i) beta_ij. The per-point
terms are the standard sparse-GP quantities, so with one component and
alpha_tilde = alpha the bound reduces to the usual single-GP one.

Gradients are computed analytically: adjoints with respect to the Gram
blocks are accumulated first and then contracted against each kernel's
parameter and input derivatives. This covers the inducing inputs as well.

All training happens on an unconstrained vector: kernel parameters and
the noise variance in log domain, alpha_tilde in log domain (clamped to
[1e-6, 1e6]), L_i with a log diagonal, Z_i and q_mean_i as-is.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import cho_solve, solve_triangular
from scipy.special import gammaln, polygamma, psi

from .errors import NumericalDegeneracyError
from .gaussmix import Gaussian, GaussianMixture
from .kernels import (
    GramOptions,
    Kernel,
    MeanFunction,
    ZeroMean,
    cross_gram,
    gram,
    jittered_param_grads,
)
from .optim import AdamState, adam_step
from .validation import (
    as_matrix,
    as_positive_float,
    as_vector,
    check_input_dim,
    check_matching_rows,
    readonly,
)

LOG2PI = math.log(2.0 * math.pi)
ALPHA_MIN = 1e-6
ALPHA_MAX = 1e6


@dataclass(frozen=True, eq=False)
class SVMGPComponent:
    """One sparse GP in the pool with its variational factor."""

    name: str
    kernel: Kernel
    inducing: np.ndarray  # (m, d)
    q_mean: np.ndarray  # (m,)
    q_sqrt: np.ndarray  # (m, m) lower triangular, positive diagonal
    mean: MeanFunction = ZeroMean()

    def __post_init__(self):
        if not self.name:
            raise ValueError("component name must be non-empty")
        Z = as_matrix(self.inducing, "inducing")
        check_input_dim(self.kernel.input_dim, Z, type(self.kernel).__name__)
        m = Z.shape[0]
        qm = as_vector(self.q_mean, "q_mean")
        if qm.shape[0] != m:
            raise ValueError(f"q_mean has length {qm.shape[0]}, expected {m}")
        L = np.asarray(self.q_sqrt, dtype=float)
        if L.shape != (m, m):
            raise ValueError(f"q_sqrt has shape {L.shape}, expected ({m}, {m})")
        if np.any(np.triu(L, 1) != 0.0):
            raise ValueError("q_sqrt must be lower triangular")
        if np.any(np.diag(L) <= 0.0) or not np.isfinite(L).all():
            raise ValueError("q_sqrt must have a positive finite diagonal")
        object.__setattr__(self, "inducing", readonly(Z))
        object.__setattr__(self, "q_mean", readonly(qm))
        object.__setattr__(self, "q_sqrt", readonly(L))

    @property
    def n_inducing(self) -> int:
        return self.inducing.shape[0]


@dataclass(frozen=True, eq=False)
class SVMGPModel:
    components: tuple[SVMGPComponent, ...]
    alpha: np.ndarray
    alpha_tilde: np.ndarray
    noise_variance: float
    gram_opts: GramOptions = GramOptions()

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise ValueError("model needs at least one component")
        names = [c.name for c in comps]
        if len(set(names)) != len(names):
            raise ValueError(f"component names must be unique, got {names}")
        a = as_vector(self.alpha, "alpha")
        at = as_vector(self.alpha_tilde, "alpha_tilde")
        if a.shape[0] != len(comps) or at.shape[0] != len(comps):
            raise ValueError("alpha and alpha_tilde must have one entry per component")
        if np.any(a <= 0) or np.any(at <= 0):
            raise ValueError("Dirichlet concentrations must be positive")
        dims = {c.inducing.shape[1] for c in comps}
        if len(dims) != 1:
            raise ValueError(f"components disagree on input dimension: {sorted(dims)}")
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "alpha", readonly(a))
        object.__setattr__(self, "alpha_tilde", readonly(at))
        object.__setattr__(
            self, "noise_variance", as_positive_float(self.noise_variance, "noise_variance")
        )

    @property
    def weights(self) -> np.ndarray:
        """Variational mean pool weights pit = alpha_tilde / sum(alpha_tilde)."""
        return self.alpha_tilde / self.alpha_tilde.sum()

    @property
    def input_dim(self) -> int:
        return self.components[0].inducing.shape[1]

    @property
    def n_components(self) -> int:
        return len(self.components)


@dataclass(frozen=True)
class SVMGPTrainConfig:
    batch_size: int = 256
    max_epochs: int = 200
    step_size: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be positive")
        if self.max_epochs < 0:
            raise ValueError("max_epochs must be nonnegative")
        as_positive_float(self.step_size, "step_size")


# ---------------------------------------------------------------------------
# initialization

def init_model(
    priors,
    alpha,
    X,
    y,
    m_per_component: int,
    *,
    names=None,
    noise_variance: float | None = None,
    gram_opts: GramOptions = GramOptions(),
) -> SVMGPModel:
    """Variational model in its canonical starting state.

    ``priors`` is a sequence of (mean, kernel) pairs. Inducing inputs are
    placed at the empirical per-dimension quantiles of X at levels
    j/(m+1); each variational factor starts at the prior it approximates
    (q_mean = m_i(Z_i), S_i = K_i(Z_i, Z_i)), so every Gaussian KL term is
    zero; alpha_tilde starts at alpha; the noise variance defaults to
    0.1 * var(y).
    """
    X = as_matrix(X)
    y = as_vector(y)
    check_matching_rows(X, y)
    priors = list(priors)
    if not priors:
        raise ValueError("need at least one prior")
    a = as_vector(alpha, "alpha")
    if a.shape[0] != len(priors):
        raise ValueError(f"{a.shape[0]} concentrations for {len(priors)} priors")
    m = int(m_per_component)
    if m < 1:
        raise ValueError("m_per_component must be at least 1")
    if names is None:
        base = []
        for _, kernel in priors:
            kind = type(kernel).__name__.removesuffix("Kernel").lower()
            base.append({"ardse": "se"}.get(kind, kind))
        names = [b if base.count(b) == 1 else f"{b}{i + 1}" for i, b in enumerate(base)]
    levels = np.arange(1, m + 1) / (m + 1)
    Z = np.quantile(X, levels, axis=0)
    comps = []
    for name, (mean, kernel) in zip(names, priors):
        K = gram(kernel, Z, gram_opts)
        comps.append(
            SVMGPComponent(
                name=name,
                kernel=kernel,
                inducing=Z,
                q_mean=mean(Z),
                q_sqrt=np.linalg.cholesky(K),
                mean=mean,
            )
        )
    s2 = 0.1 * float(np.var(y)) if noise_variance is None else noise_variance
    return SVMGPModel(
        components=tuple(comps),
        alpha=a,
        alpha_tilde=np.clip(a, ALPHA_MIN, ALPHA_MAX),
        noise_variance=max(s2, 1e-10),
        gram_opts=gram_opts,
    )


# ---------------------------------------------------------------------------
# KL terms

def kl_dirichlet(alpha_tilde, alpha) -> float:
    """KL( Dir(alpha_tilde) || Dir(alpha) ), in closed form."""
    at = as_vector(alpha_tilde, "alpha_tilde")
    a = as_vector(alpha, "alpha")
    if at.shape != a.shape:
        raise ValueError("alpha_tilde and alpha must have equal length")
    if np.any(at <= 0) or np.any(a <= 0):
        raise ValueError("Dirichlet concentrations must be positive")
    if np.array_equal(at, a):
        return 0.0  # exact, not just up to rounding in the gammaln terms
    at0, a0 = at.sum(), a.sum()
    return float(
        gammaln(at0)
        - gammaln(at).sum()
        - gammaln(a0)
        + gammaln(a).sum()
        + (at - a) @ (psi(at) - psi(at0))
    )


def _component_kl(comp: SVMGPComponent, opts: GramOptions) -> float:
    K = gram(comp.kernel, comp.inducing, opts)
    LK = np.linalg.cholesky(K)
    Lf = comp.q_sqrt
    u = comp.q_mean - comp.mean(comp.inducing)
    A = solve_triangular(LK, Lf, lower=True)
    zu = solve_triangular(LK, u, lower=True)
    m = comp.n_inducing
    return float(
        0.5 * (np.sum(A * A) + zu @ zu - m)
        + np.sum(np.log(np.diag(LK)))
        - np.sum(np.log(np.diag(Lf)))
    )


def kl_gaussian_component(model: SVMGPModel, i: int) -> float:
    """KL( N(q_mean_i, S_i) || N(m_i(Z_i), K_i(Z_i, Z_i)) )."""
    return _component_kl(model.components[int(i)], model.gram_opts)


# ---------------------------------------------------------------------------
# ELBO

def _batch(model: SVMGPModel, X, y, n_total: int):
    X = as_matrix(X, "X_batch")
    y = as_vector(y, "y_batch")
    check_matching_rows(X, y, "X_batch", "y_batch")
    check_input_dim(model.input_dim, X, "model")
    n_total = int(n_total)
    if n_total < X.shape[0]:
        raise ValueError(f"n_total={n_total} is smaller than the batch ({X.shape[0]} rows)")
    return X, y, n_total


def _component_forward(comp: SVMGPComponent, s2: float, opts: GramOptions, X, y):
    """Per-point bound terms of one component plus reusable intermediates."""
    K = gram(comp.kernel, comp.inducing, opts)
    LK = np.linalg.cholesky(K)
    Kmn = cross_gram(comp.kernel, comp.inducing, X)
    kdiag = comp.kernel.diag(X)
    u = comp.q_mean - comp.mean(comp.inducing)
    B = cho_solve((LK, True), Kmn)
    mu = comp.mean(X) + B.T @ u
    delta = y - mu
    ktilde = kdiag - np.sum(Kmn * B, axis=0)
    Lf = comp.q_sqrt
    S = Lf @ Lf.T
    SB = S @ B
    qv = np.sum(B * SB, axis=0)
    terms = -0.5 * LOG2PI - 0.5 * np.log(s2) - (delta**2 + ktilde + qv) / (2.0 * s2)
    return {
        "LK": LK, "Kmn": Kmn, "B": B, "u": u, "delta": delta,
        "ktilde": ktilde, "S": S, "SB": SB, "qv": qv, "terms": terms,
    }


def expected_log_lik(model: SVMGPModel, X_batch, y_batch, n_total: int) -> float:
    """The rescaled data term of the bound on its own (no KL parts)."""
    X, y, n_total = _batch(model, X_batch, y_batch, n_total)
    scale = n_total / X.shape[0]
    pit = model.weights
    total = 0.0
    for w, comp in zip(pit, model.components):
        fwd = _component_forward(comp, model.noise_variance, model.gram_opts, X, y)
        total += w * fwd["terms"].sum()
    return float(scale * total)


def elbo(model: SVMGPModel, X_batch, y_batch, n_total: int) -> float:
    """Minibatch estimate of the evidence lower bound."""
    X, y, n_total = _batch(model, X_batch, y_batch, n_total)
    value = expected_log_lik(model, X, y, n_total)
    for i in range(model.n_components):
        value -= _component_kl(model.components[i], model.gram_opts)
    value -= kl_dirichlet(model.alpha_tilde, model.alpha)
    return float(value)


# ---------------------------------------------------------------------------
# unconstrained parameter vector

def _pack_lower(L: np.ndarray) -> np.ndarray:
    """Row-major lower triangle with the diagonal in log domain."""
    m = L.shape[0]
    out = []
    for a in range(m):
        out.extend(L[a, :a])
        out.append(math.log(L[a, a]))
    return np.array(out)


def _unpack_lower(vec: np.ndarray, m: int) -> np.ndarray:
    L = np.zeros((m, m))
    at = 0
    for a in range(m):
        L[a, :a] = vec[at : at + a]
        at += a
        L[a, a] = math.exp(vec[at])
        at += 1
    return L


def _component_layout(comp: SVMGPComponent) -> list[tuple[str, int]]:
    m, d = comp.inducing.shape
    return [
        ("kernel", len(comp.kernel.param_names)),
        ("inducing", m * d),
        ("q_mean", m),
        ("q_sqrt", m * (m + 1) // 2),
    ]


def model_param_names(model: SVMGPModel) -> list[str]:
    names: list[str] = []
    for c in model.components:
        names += [f"{c.name}.kernel.{p}" for p in c.kernel.param_names]
        m, d = c.inducing.shape
        names += [f"{c.name}.inducing[{a},{b}]" for a in range(m) for b in range(d)]
        names += [f"{c.name}.q_mean[{a}]" for a in range(m)]
        names += [
            f"{c.name}.q_sqrt[{a},{b}]" for a in range(m) for b in range(a + 1)
        ]
    names += [f"log_alpha_tilde[{i}]" for i in range(model.n_components)]
    names.append("log_noise_variance")
    return names


def model_theta(model: SVMGPModel) -> np.ndarray:
    parts = []
    for c in model.components:
        parts.append(c.kernel.theta)
        parts.append(c.inducing.ravel())
        parts.append(c.q_mean)
        parts.append(_pack_lower(c.q_sqrt))
    parts.append(np.log(model.alpha_tilde))
    parts.append([math.log(model.noise_variance)])
    return np.concatenate(parts)


def model_with_theta(model: SVMGPModel, theta) -> SVMGPModel:
    t = as_vector(theta, "theta", require_finite=False)
    comps = []
    at = 0
    for c in model.components:
        m, d = c.inducing.shape
        sizes = dict(_component_layout(c))
        kernel = c.kernel.with_theta(t[at : at + sizes["kernel"]])
        at += sizes["kernel"]
        Z = t[at : at + m * d].reshape(m, d)
        at += m * d
        qm = t[at : at + m]
        at += m
        Lf = _unpack_lower(t[at : at + sizes["q_sqrt"]], m)
        at += sizes["q_sqrt"]
        comps.append(replace(c, kernel=kernel, inducing=Z, q_mean=qm, q_sqrt=Lf))
    k = model.n_components
    alpha_tilde = np.clip(np.exp(t[at : at + k]), ALPHA_MIN, ALPHA_MAX)
    at += k
    if at + 1 != t.shape[0]:
        raise ValueError(f"parameter vector has {t.shape[0]} entries, expected {at + 1}")
    return replace(
        model,
        components=tuple(comps),
        alpha_tilde=alpha_tilde,
        noise_variance=math.exp(t[at]),
    )


# ---------------------------------------------------------------------------
# gradient

def _elbo_value_and_grad(model: SVMGPModel, X, y, n_total: int):
    s2 = model.noise_variance
    opts = model.gram_opts
    b = X.shape[0]
    scale = n_total / b
    at = model.alpha_tilde
    at0 = at.sum()
    pit = at / at0
    k = model.n_components

    value = -kl_dirichlet(at, model.alpha)
    T = np.zeros(k)  # per-component summed data terms (unscaled, unweighted)
    comp_grads = []
    g_logs2 = 0.0

    for i, comp in enumerate(model.components):
        fwd = _component_forward(comp, s2, opts, X, y)
        LK, Kmn, B = fwd["LK"], fwd["Kmn"], fwd["B"]
        u, delta, ktilde = fwd["u"], fwd["delta"], fwd["ktilde"]
        S, SB, qv = fwd["S"], fwd["SB"], fwd["qv"]
        T[i] = fwd["terms"].sum()
        m = comp.n_inducing
        Lf = comp.q_sqrt
        c = scale * pit[i]

        # --- data-term adjoints
        g_mu = c * delta / s2
        g_u = B @ g_mu
        half = c / (2.0 * s2)
        G_B = np.outer(u, g_mu) + half * Kmn - (c / s2) * SB
        G_Kmn = half * B
        g_kdiag = np.full(b, -half)
        G_S = -half * (B @ B.T)
        g_qmean = g_u.copy()
        g_m0 = -g_u
        # already in the log domain: s2 * d(term)/d(s2)
        g_logs2 += c * np.sum(-0.5 + (delta**2 + ktilde + qv) / (2.0 * s2))

        # resolve B = K^-1 Kmn
        KinvGB = cho_solve((LK, True), G_B)
        G_Kmn = G_Kmn + KinvGB
        G_K = -KinvGB @ B.T

        # --- Gaussian KL adjoints (KL enters the bound negatively)
        Kinv = cho_solve((LK, True), np.eye(m))
        Sinv = cho_solve((Lf, True), np.eye(m))
        Kinv_u = Kinv @ u
        value -= float(
            0.5 * (np.sum(Kinv * S) + u @ Kinv_u - m)
            + np.sum(np.log(np.diag(LK)))
            - np.sum(np.log(np.diag(Lf)))
        )
        G_S -= 0.5 * (Kinv - Sinv)
        g_qmean -= Kinv_u
        g_m0 += Kinv_u
        G_K -= 0.5 * (Kinv - Kinv @ S @ Kinv - np.outer(Kinv_u, Kinv_u))

        # --- map matrix adjoints to the packed parameters
        gk = []
        dK_list = jittered_param_grads(comp.kernel, comp.inducing, opts)
        dKmn_list = comp.kernel.cross_param_grads(comp.inducing, X)
        dkd_list = comp.kernel.diag_param_grads(X)
        for dK, dKmn, dkd in zip(dK_list, dKmn_list, dkd_list):
            gk.append(np.sum(G_K * dK) + np.sum(G_Kmn * dKmn) + g_kdiag @ dkd)

        D1K = comp.kernel.grad_x1(comp.inducing, comp.inducing)
        D1k = comp.kernel.grad_x1(comp.inducing, X)
        Gsym = G_K + G_K.T
        gZ = np.einsum("cb,cbd->cd", Gsym, D1K) + np.einsum("cj,cjd->cd", G_Kmn, D1k)
        gZ += g_m0[:, None] * comp.mean.grad_x(comp.inducing)
        if opts.jitter_scale:
            diag_d1 = D1K[np.arange(m), np.arange(m), :]  # (m, d)
            gZ += np.trace(G_K) * opts.jitter_scale * (2.0 / m) * diag_d1

        G_L = np.tril((G_S + G_S.T) @ Lf)
        G_L[np.diag_indices(m)] *= np.diag(Lf)

        comp_grads.append(
            np.concatenate([np.array(gk), gZ.ravel(), g_qmean, _pack_lower_grad(G_L)])
        )

    value += scale * float(pit @ T)

    # --- alpha_tilde (log domain)
    g_pit = scale * T
    g_at = (g_pit - pit @ g_pit) / at0  # through the normalization
    diff = at - model.alpha
    g_at -= diff * polygamma(1, at) - polygamma(1, at0) * diff.sum()
    g_log_at = g_at * at

    grad = np.concatenate(comp_grads + [g_log_at, [g_logs2]])
    return float(value), grad


def _pack_lower_grad(G: np.ndarray) -> np.ndarray:
    """Row-major lower triangle of a gradient matrix (diagonal already chained)."""
    m = G.shape[0]
    out = []
    for a in range(m):
        out.extend(G[a, : a + 1])
    return np.array(out)


def elbo_grad(model: SVMGPModel, X_batch, y_batch, n_total: int) -> np.ndarray:
    """Exact bound gradient over the packed unconstrained parameters.

    Order matches model_theta / model_param_names: per component the kernel
    parameters, inducing inputs, q_mean, packed q_sqrt; then log
    alpha_tilde; then the log noise variance. Mean-function parameters are
    not trained in the sparse model.
    """
    X, y, n_total = _batch(model, X_batch, y_batch, n_total)
    return _elbo_value_and_grad(model, X, y, n_total)[1]


# ---------------------------------------------------------------------------
# training

def train(model: SVMGPModel, X, y, config: SVMGPTrainConfig = SVMGPTrainConfig()) -> tuple[SVMGPModel, list[float]]:
    """Minibatch stochastic ascent of the bound.

    Shuffling is driven by a counter-based generator seeded from the
    config, so identical (model, data, config) yield identical parameter
    trajectories. Returns the trained model and the full-data ELBO trace,
    evaluated before training and after every epoch.
    """
    X = as_matrix(X)
    y = as_vector(y)
    check_matching_rows(X, y)
    check_input_dim(model.input_dim, X, "model")
    n = X.shape[0]
    if config.batch_size > n:
        raise ValueError(f"batch_size={config.batch_size} exceeds the dataset size n={n}")

    rng = np.random.Generator(np.random.Philox(int(config.seed)))
    params = model_theta(model)
    state = AdamState.zeros(params.size)
    current = model
    trace = [elbo(current, X, y, n)]
    if not np.isfinite(trace[0]):
        raise NumericalDegeneracyError(_diagnose(current, X, y, n, epoch=0))
    for epoch in range(1, config.max_epochs + 1):
        order = rng.permutation(n)
        for start in range(0, n, config.batch_size):
            idx = order[start : start + config.batch_size]
            _, grad = _elbo_value_and_grad(current, X[idx], y[idx], n)
            if not np.isfinite(grad).all():
                raise NumericalDegeneracyError(
                    f"epoch {epoch}: {_blame_gradient(current, grad)}"
                )
            step, state = adam_step(state, grad, config.step_size)
            params = params + step
            current = model_with_theta(current, params)
            params = model_theta(current)  # reflect the alpha_tilde clamp
        full = elbo(current, X, y, n)
        if not np.isfinite(full):
            raise NumericalDegeneracyError(_diagnose(current, X, y, n, epoch))
        trace.append(full)
    return current, trace


def _blame_gradient(model: SVMGPModel, grad: np.ndarray) -> str:
    names = model_param_names(model)
    bad = [names[i] for i in np.flatnonzero(~np.isfinite(grad))[:4]]
    return f"non-finite gradient in {', '.join(bad)}"


def _diagnose(model: SVMGPModel, X, y, n_total: int, epoch: int) -> str:
    parts = []
    for i, comp in enumerate(model.components):
        try:
            fwd = _component_forward(comp, model.noise_variance, model.gram_opts, X, y)
            data_ok = np.isfinite(fwd["terms"]).all()
            kl_ok = np.isfinite(_component_kl(comp, model.gram_opts))
        except NumericalDegeneracyError:
            data_ok = kl_ok = False
        if not (data_ok and kl_ok):
            parts.append(comp.name)
    what = ", ".join(parts) if parts else "the Dirichlet term"
    return f"epoch {epoch}: ELBO is not finite (offending: {what})"


# ---------------------------------------------------------------------------
# prediction

def predict_f(model: SVMGPModel, Xs) -> GaussianMixture:
    """Variational posterior mixture over latent function values.

    Component i has mean m_i(X*) + K_*m K_mm^-1 (q_mean_i - m_i(Z_i)) and
    covariance K_** - K_*m K_mm^-1 (K_mm - S_i) K_mm^-1 K_m*; the mixture
    weights are the variational mean weights pit.
    """
    Xs = as_matrix(Xs, "X*")
    check_input_dim(model.input_dim, Xs, "model")
    comps = []
    for comp in model.components:
        K = gram(comp.kernel, comp.inducing, model.gram_opts)
        LK = np.linalg.cholesky(K)
        Ksm = cross_gram(comp.kernel, Xs, comp.inducing)
        Kss = gram(comp.kernel, Xs, model.gram_opts)
        A = cho_solve((LK, True), Ksm.T)  # K_mm^-1 K_m*
        mean = comp.mean(Xs) + A.T @ (comp.q_mean - comp.mean(comp.inducing))
        W = comp.q_sqrt.T @ A
        cov = Kss - Ksm @ A + W.T @ W
        comps.append(Gaussian(mean, 0.5 * (cov + cov.T)))
    return GaussianMixture(model.weights, tuple(comps))


def predict_y(model: SVMGPModel, Xs) -> GaussianMixture:
    """Variational posterior predictive over noisy observations."""
    return predict_f(model, Xs).add_diagonal_noise(model.noise_variance)
