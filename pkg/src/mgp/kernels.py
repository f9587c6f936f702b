"""Covariance kernels and mean functions for GP priors.

Three kernel families:

* ``ARDSEKernel``: squared exponential with one lengthscale per input
  dimension,  k(x, x') = s2 * exp(-0.5 * sum_j (x_j - x'_j)^2 / l_j^2).
  With a single lengthscale this is the usual SE kernel.
* ``LinearKernel``: k(x, x') = sb2 + sv2 * <x, x'> (any input dimension).
* ``PeriodicKernel``: k(x, x') = s2 * exp(-2 sin^2(pi |x - x'| / p) / l^2),
  one-dimensional inputs only.

All positive hyperparameters are stored in the natural domain and exposed
to optimizers through ``theta`` / ``with_theta`` as unconstrained logs.
Each kernel also provides analytic derivatives of its Gram blocks with
respect to those unconstrained parameters and with respect to its first
input block (needed for trainable inducing locations).

Kernel and mean objects are immutable values; all methods return new
arrays and never mutate their inputs.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalDegeneracyError
from .validation import as_matrix, as_positive_float, check_input_dim


@dataclass(frozen=True)
class GramOptions:
    """Numerical policy for Gram-matrix construction.

    jitter_scale scales the diagonal nugget: the jitter actually added is
    jitter_scale times the mean of the raw diagonal, so it tracks the
    kernel's output scale. Zero disables jitter.
    """

    jitter_scale: float = 1e-6

    def __post_init__(self):
        if not np.isfinite(self.jitter_scale) or self.jitter_scale < 0:
            raise ValueError(f"jitter_scale must be nonnegative, got {self.jitter_scale!r}")


# ---------------------------------------------------------------------------
# kernels


@dataclass(frozen=True)
class ARDSEKernel:
    """Squared-exponential kernel with per-dimension lengthscales."""

    signal_variance: float
    lengthscales: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "signal_variance", as_positive_float(self.signal_variance, "signal_variance"))
        ls = tuple(as_positive_float(l, "lengthscale") for l in np.atleast_1d(np.asarray(self.lengthscales, dtype=float)))
        if not ls:
            raise ValueError("ARDSEKernel needs at least one lengthscale")
        object.__setattr__(self, "lengthscales", ls)

    @property
    def input_dim(self) -> int:
        return len(self.lengthscales)

    @property
    def param_names(self) -> tuple[str, ...]:
        return ("log_signal_variance",) + tuple(
            f"log_lengthscale_{j + 1}" for j in range(self.input_dim)
        )

    @property
    def theta(self) -> np.ndarray:
        return np.log(np.concatenate(([self.signal_variance], self.lengthscales)))

    def with_theta(self, theta) -> "ARDSEKernel":
        t = np.asarray(theta, dtype=float)
        if t.shape != (1 + self.input_dim,):
            raise ValueError(f"expected {1 + self.input_dim} parameters, got shape {t.shape}")
        vals = np.exp(t)
        return ARDSEKernel(vals[0], tuple(vals[1:]))

    def _scaled_sq_dists(self, X1, X2):
        ls = np.asarray(self.lengthscales)
        diff = X1[:, None, :] - X2[None, :, :]
        return diff, np.sum((diff / ls) ** 2, axis=-1)

    def cross(self, X1: np.ndarray, X2: np.ndarray) -> np.ndarray:
        _, d2 = self._scaled_sq_dists(X1, X2)
        return self.signal_variance * np.exp(-0.5 * d2)

    def diag(self, X: np.ndarray) -> np.ndarray:
        return np.full(X.shape[0], self.signal_variance)

    def cross_param_grads(self, X1: np.ndarray, X2: np.ndarray) -> list[np.ndarray]:
        diff, d2 = self._scaled_sq_dists(X1, X2)
        K = self.signal_variance * np.exp(-0.5 * d2)
        ls = np.asarray(self.lengthscales)
        grads = [K]
        for j in range(self.input_dim):
            grads.append(K * (diff[:, :, j] / ls[j]) ** 2)
        return grads

    def diag_param_grads(self, X: np.ndarray) -> list[np.ndarray]:
        n = X.shape[0]
        return [np.full(n, self.signal_variance)] + [np.zeros(n)] * self.input_dim

    def grad_x1(self, X1: np.ndarray, X2: np.ndarray) -> np.ndarray:
        """d k(x1_i, x2_j) / d x1_i, shape (n1, n2, d)."""
        diff, d2 = self._scaled_sq_dists(X1, X2)
        K = self.signal_variance * np.exp(-0.5 * d2)
        ls2 = np.asarray(self.lengthscales) ** 2
        return -K[:, :, None] * diff / ls2


@dataclass(frozen=True)
class LinearKernel:
    """Dot-product kernel k(x, x') = bias_variance + weight_variance * <x, x'>."""

    bias_variance: float
    weight_variance: float

    def __post_init__(self):
        object.__setattr__(self, "bias_variance", as_positive_float(self.bias_variance, "bias_variance"))
        object.__setattr__(self, "weight_variance", as_positive_float(self.weight_variance, "weight_variance"))

    input_dim = None  # accepts any dimension

    @property
    def param_names(self) -> tuple[str, ...]:
        return ("log_bias_variance", "log_weight_variance")

    @property
    def theta(self) -> np.ndarray:
        return np.log([self.bias_variance, self.weight_variance])

    def with_theta(self, theta) -> "LinearKernel":
        t = np.asarray(theta, dtype=float)
        if t.shape != (2,):
            raise ValueError(f"expected 2 parameters, got shape {t.shape}")
        return LinearKernel(math.exp(t[0]), math.exp(t[1]))

    def cross(self, X1: np.ndarray, X2: np.ndarray) -> np.ndarray:
        return self.bias_variance + self.weight_variance * (X1 @ X2.T)

    def diag(self, X: np.ndarray) -> np.ndarray:
        return self.bias_variance + self.weight_variance * np.sum(X * X, axis=1)

    def cross_param_grads(self, X1: np.ndarray, X2: np.ndarray) -> list[np.ndarray]:
        shape = (X1.shape[0], X2.shape[0])
        return [
            np.full(shape, self.bias_variance),
            self.weight_variance * (X1 @ X2.T),
        ]

    def diag_param_grads(self, X: np.ndarray) -> list[np.ndarray]:
        return [
            np.full(X.shape[0], self.bias_variance),
            self.weight_variance * np.sum(X * X, axis=1),
        ]

    def grad_x1(self, X1: np.ndarray, X2: np.ndarray) -> np.ndarray:
        n1 = X1.shape[0]
        return self.weight_variance * np.broadcast_to(X2[None, :, :], (n1,) + X2.shape).copy()


@dataclass(frozen=True)
class PeriodicKernel:
    """Exponentiated-sine kernel for one-dimensional periodic structure."""

    signal_variance: float
    lengthscale: float
    period: float

    def __post_init__(self):
        object.__setattr__(self, "signal_variance", as_positive_float(self.signal_variance, "signal_variance"))
        object.__setattr__(self, "lengthscale", as_positive_float(self.lengthscale, "lengthscale"))
        object.__setattr__(self, "period", as_positive_float(self.period, "period"))

    input_dim = 1

    @property
    def param_names(self) -> tuple[str, ...]:
        return ("log_signal_variance", "log_lengthscale", "log_period")

    @property
    def theta(self) -> np.ndarray:
        return np.log([self.signal_variance, self.lengthscale, self.period])

    def with_theta(self, theta) -> "PeriodicKernel":
        t = np.asarray(theta, dtype=float)
        if t.shape != (3,):
            raise ValueError(f"expected 3 parameters, got shape {t.shape}")
        return PeriodicKernel(math.exp(t[0]), math.exp(t[1]), math.exp(t[2]))

    def _delta(self, X1, X2):
        if X1.shape[1] != 1 or X2.shape[1] != 1:
            raise ValueError("the periodic kernel only accepts one-dimensional inputs")
        return X1[:, 0][:, None] - X2[:, 0][None, :]

    def cross(self, X1: np.ndarray, X2: np.ndarray) -> np.ndarray:
        r = self._delta(X1, X2)
        s = np.sin(np.pi * r / self.period)
        return self.signal_variance * np.exp(-2.0 * s * s / self.lengthscale**2)

    def diag(self, X: np.ndarray) -> np.ndarray:
        return np.full(X.shape[0], self.signal_variance)

    def cross_param_grads(self, X1: np.ndarray, X2: np.ndarray) -> list[np.ndarray]:
        l2, p = self.lengthscale**2, self.period
        r = self._delta(X1, X2)
        s = np.sin(np.pi * r / p)
        K = self.signal_variance * np.exp(-2.0 * s * s / l2)
        sin2w = np.sin(2.0 * np.pi * r / p)
        return [
            K,
            K * (4.0 * s * s / l2),
            K * (2.0 * np.pi * r / (l2 * p)) * sin2w,
        ]

    def diag_param_grads(self, X: np.ndarray) -> list[np.ndarray]:
        n = X.shape[0]
        return [np.full(n, self.signal_variance), np.zeros(n), np.zeros(n)]

    def grad_x1(self, X1: np.ndarray, X2: np.ndarray) -> np.ndarray:
        l2, p = self.lengthscale**2, self.period
        r = self._delta(X1, X2)
        s = np.sin(np.pi * r / p)
        K = self.signal_variance * np.exp(-2.0 * s * s / l2)
        g = -K * (2.0 * np.pi / (l2 * p)) * np.sin(2.0 * np.pi * r / p)
        return g[:, :, None]


Kernel = ARDSEKernel | LinearKernel | PeriodicKernel


# ---------------------------------------------------------------------------
# mean functions


@dataclass(frozen=True)
class ZeroMean:
    n_params = 0
    param_names: tuple[str, ...] = ()

    @property
    def theta(self) -> np.ndarray:
        return np.zeros(0)

    def with_theta(self, theta) -> "ZeroMean":
        if len(np.asarray(theta).ravel()) != 0:
            raise ValueError("ZeroMean takes no parameters")
        return self

    def __call__(self, X: np.ndarray) -> np.ndarray:
        return np.zeros(X.shape[0])

    def param_grads(self, X: np.ndarray) -> list[np.ndarray]:
        return []

    def grad_x(self, X: np.ndarray) -> np.ndarray:
        return np.zeros_like(X)


@dataclass(frozen=True)
class ConstantMean:
    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))

    n_params = 1
    param_names: tuple[str, ...] = ("value",)

    @property
    def theta(self) -> np.ndarray:
        return np.array([self.value])

    def with_theta(self, theta) -> "ConstantMean":
        t = np.asarray(theta, dtype=float)
        if t.shape != (1,):
            raise ValueError(f"expected 1 parameter, got shape {t.shape}")
        return ConstantMean(t[0])

    def __call__(self, X: np.ndarray) -> np.ndarray:
        return np.full(X.shape[0], self.value)

    def param_grads(self, X: np.ndarray) -> list[np.ndarray]:
        return [np.ones(X.shape[0])]

    def grad_x(self, X: np.ndarray) -> np.ndarray:
        return np.zeros_like(X)


@dataclass(frozen=True)
class LinearMean:
    """Affine mean m(x) = <weights, x> + bias."""

    weights: tuple[float, ...]
    bias: float = 0.0

    def __post_init__(self):
        w = tuple(float(v) for v in np.atleast_1d(np.asarray(self.weights, dtype=float)))
        if not w:
            raise ValueError("LinearMean needs at least one weight")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", float(self.bias))

    @property
    def input_dim(self) -> int:
        return len(self.weights)

    @property
    def n_params(self) -> int:
        return len(self.weights) + 1

    @property
    def param_names(self) -> tuple[str, ...]:
        return tuple(f"weight_{j + 1}" for j in range(len(self.weights))) + ("bias",)

    @property
    def theta(self) -> np.ndarray:
        return np.concatenate([self.weights, [self.bias]])

    def with_theta(self, theta) -> "LinearMean":
        t = np.asarray(theta, dtype=float)
        if t.shape != (self.n_params,):
            raise ValueError(f"expected {self.n_params} parameters, got shape {t.shape}")
        return LinearMean(tuple(t[:-1]), t[-1])

    def __call__(self, X: np.ndarray) -> np.ndarray:
        check_input_dim(self.input_dim, X, "LinearMean")
        return X @ np.asarray(self.weights) + self.bias

    def param_grads(self, X: np.ndarray) -> list[np.ndarray]:
        check_input_dim(self.input_dim, X, "LinearMean")
        return [X[:, j].copy() for j in range(self.input_dim)] + [np.ones(X.shape[0])]

    def grad_x(self, X: np.ndarray) -> np.ndarray:
        check_input_dim(self.input_dim, X, "LinearMean")
        return np.broadcast_to(np.asarray(self.weights), X.shape).copy()


MeanFunction = ZeroMean | ConstantMean | LinearMean


# ---------------------------------------------------------------------------
# operations


def kernel_eval(kernel: Kernel, x, xp) -> float:
    """Evaluate the kernel on a single pair of input vectors."""
    a = np.atleast_1d(np.asarray(x, dtype=float))
    b = np.atleast_1d(np.asarray(xp, dtype=float))
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"x and x' must be vectors of equal length, got {a.shape} and {b.shape}")
    check_input_dim(kernel.input_dim, a[None, :], type(kernel).__name__)
    return float(kernel.cross(a[None, :], b[None, :])[0, 0])


def mean_eval(mean: MeanFunction, X) -> np.ndarray:
    """Evaluate a mean function row-wise on an n×d input matrix."""
    return mean(as_matrix(X))


def gram(kernel: Kernel, X, opts: GramOptions = GramOptions()) -> np.ndarray:
    """Jittered symmetric Gram matrix of ``kernel`` on the rows of ``X``.

    The result is exactly symmetric, carries jitter_scale * mean(raw diagonal)
    on the diagonal, and is verified to admit a Cholesky factorization.
    """
    X = as_matrix(X)
    check_input_dim(kernel.input_dim, X, type(kernel).__name__)
    K = kernel.cross(X, X)
    lower = np.tril(K)
    K = lower + np.tril(K, -1).T  # one value per unordered pair
    jitter = opts.jitter_scale * float(np.mean(np.diag(K)))
    if jitter:
        K = K + jitter * np.eye(X.shape[0])
    try:
        np.linalg.cholesky(K)
    except np.linalg.LinAlgError:
        raise NumericalDegeneracyError(
            f"Gram matrix of {type(kernel).__name__} on {X.shape[0]} points is not "
            f"positive definite (jitter {jitter:.3e})"
        ) from None
    return K


def cross_gram(kernel: Kernel, X, X2) -> np.ndarray:
    """Cross-covariance block between two input sets; never jittered."""
    X = as_matrix(X)
    X2 = as_matrix(X2, "X2")
    if X.shape[1] != X2.shape[1]:
        raise ValueError(f"X and X2 disagree on input dimension: {X.shape[1]} vs {X2.shape[1]}")
    check_input_dim(kernel.input_dim, X, type(kernel).__name__)
    return kernel.cross(X, X2)


def kernel_param_grads(kernel: Kernel, X) -> list[np.ndarray]:
    """Derivatives of the raw (unjittered) Gram matrix.

    One n×n matrix per unconstrained parameter, in ``param_names`` order;
    entries are dK/d(log parameter) for log-domain parameters.
    """
    X = as_matrix(X)
    check_input_dim(kernel.input_dim, X, type(kernel).__name__)
    return [0.5 * (G + G.T) for G in kernel.cross_param_grads(X, X)]


def jittered_param_grads(kernel: Kernel, X, opts: GramOptions) -> list[np.ndarray]:
    """Like kernel_param_grads but for gram(): includes d(jitter)/d(theta)."""
    X = as_matrix(X)
    grads = kernel_param_grads(kernel, X)
    if opts.jitter_scale:
        eye = np.eye(X.shape[0])
        grads = [G + opts.jitter_scale * float(np.mean(np.diag(G))) * eye for G in grads]
    return grads


# ---------------------------------------------------------------------------
# serialization

_KERNEL_KINDS = {"ard_se": ARDSEKernel, "linear": LinearKernel, "periodic": PeriodicKernel}
_MEAN_KINDS = {"zero": ZeroMean, "constant": ConstantMean, "linear": LinearMean}


def kernel_to_config(kernel: Kernel) -> dict:
    """Natural-domain configuration object for a kernel spec."""
    if isinstance(kernel, ARDSEKernel):
        return {
            "kind": "ard_se",
            "params": {
                "signal_variance": kernel.signal_variance,
                "lengthscales": list(kernel.lengthscales),
            },
        }
    if isinstance(kernel, LinearKernel):
        return {
            "kind": "linear",
            "params": {
                "bias_variance": kernel.bias_variance,
                "weight_variance": kernel.weight_variance,
            },
        }
    if isinstance(kernel, PeriodicKernel):
        return {
            "kind": "periodic",
            "params": {
                "signal_variance": kernel.signal_variance,
                "lengthscale": kernel.lengthscale,
                "period": kernel.period,
            },
        }
    raise TypeError(f"not a kernel spec: {kernel!r}")


def kernel_from_config(cfg: dict) -> Kernel:
    try:
        kind = cfg["kind"]
        params = dict(cfg.get("params", {}))
    except (TypeError, KeyError):
        raise ValueError(f"malformed kernel config: {cfg!r}") from None
    if kind not in _KERNEL_KINDS:
        raise ValueError(f"unknown kernel kind {kind!r}; expected one of {sorted(_KERNEL_KINDS)}")
    if kind == "ard_se":
        return ARDSEKernel(params["signal_variance"], tuple(params["lengthscales"]))
    if kind == "linear":
        return LinearKernel(params["bias_variance"], params["weight_variance"])
    return PeriodicKernel(params["signal_variance"], params["lengthscale"], params["period"])


def mean_to_config(mean: MeanFunction) -> dict:
    if isinstance(mean, ZeroMean):
        return {"kind": "zero", "params": {}}
    if isinstance(mean, ConstantMean):
        return {"kind": "constant", "params": {"value": mean.value}}
    if isinstance(mean, LinearMean):
        return {"kind": "linear", "params": {"weights": list(mean.weights), "bias": mean.bias}}
    raise TypeError(f"not a mean spec: {mean!r}")


def mean_from_config(cfg: dict) -> MeanFunction:
    try:
        kind = cfg["kind"]
        params = dict(cfg.get("params", {}))
    except (TypeError, KeyError):
        raise ValueError(f"malformed mean config: {cfg!r}") from None
    if kind == "zero":
        return ZeroMean()
    if kind == "constant":
        return ConstantMean(params["value"])
    if kind == "linear":
        return LinearMean(tuple(params["weights"]), params.get("bias", 0.0))
    raise ValueError(f"unknown mean kind {kind!r}; expected one of {sorted(_MEAN_KINDS)}")
