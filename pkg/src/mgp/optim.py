"""Adaptive first-order ascent.

Two entry points: a bare Adam-style update for stochastic training loops,
and a guarded full-batch loop for deterministic hyperparameter fitting.
The guard rejects any proposal that lowers the objective and halves the
step size instead, so the trace of accepted values never decreases.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalDegeneracyError

BETA1 = 0.9
BETA2 = 0.999
EPS = 1e-8


@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray
    t: int = 0

    @classmethod
    def zeros(cls, n: int) -> "AdamState":
        return cls(m=np.zeros(n), v=np.zeros(n), t=0)


def adam_step(state: AdamState, grad: np.ndarray, step_size: float) -> tuple[np.ndarray, AdamState]:
    """One ascent update; returns (parameter increment, advanced state)."""
    t = state.t + 1
    m = BETA1 * state.m + (1.0 - BETA1) * grad
    v = BETA2 * state.v + (1.0 - BETA2) * grad * grad
    mhat = m / (1.0 - BETA1**t)
    vhat = v / (1.0 - BETA2**t)
    return step_size * mhat / (np.sqrt(vhat) + EPS), AdamState(m, v, t)


def maximize_monotone(
    value_and_grad,
    x0: np.ndarray,
    *,
    max_iter: int,
    step_size: float,
    tol: float,
    patience: int,
    what: str = "objective",
) -> tuple[np.ndarray, list[float]]:
    """Guarded Adam ascent of a deterministic objective.

    value_and_grad(x) -> (value, gradient). Proposals that fail to match or
    improve the current value are rejected and retried with half the step
    size (Adam moments are only advanced on acceptance). Stops after
    ``patience`` consecutive accepted steps whose improvement is below
    ``tol``, when the step size underflows, or at ``max_iter`` accepted
    steps. Returns the final point and the accepted-value trace (the
    initial value first).
    """
    x = np.asarray(x0, dtype=float).copy()
    value, grad = value_and_grad(x)
    if not np.isfinite(value):
        raise NumericalDegeneracyError(f"{what} is not finite at the initial parameters")
    trace = [float(value)]
    state = AdamState.zeros(x.size)
    lr = float(step_size)
    flat = 0
    for _ in range(max_iter):
        if not np.isfinite(grad).all():
            raise NumericalDegeneracyError(f"{what} gradient is not finite")
        accepted = False
        while lr > 1e-15:
            delta, proposed_state = adam_step(state, grad, lr)
            x_new = x + delta
            v_new, g_new = value_and_grad(x_new)
            if np.isfinite(v_new) and v_new >= value:
                x, value, grad, state = x_new, v_new, g_new, proposed_state
                accepted = True
                break
            lr *= 0.5
        if not accepted:
            break
        improvement = value - trace[-1]
        trace.append(float(value))
        flat = flat + 1 if improvement < tol else 0
        if flat >= patience:
            break
    return x, trace
