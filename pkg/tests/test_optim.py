"""Guarded ascent behaviour."""

import numpy as np
import pytest

from mgp.errors import NumericalDegeneracyError
from mgp.optim import AdamState, adam_step, maximize_monotone


def quad(x):
    v = -float(np.sum((x - 2.0) ** 2))
    return v, -2.0 * (x - 2.0)


def test_first_step_has_unit_scale():
    state = AdamState.zeros(2)
    inc, state = adam_step(state, np.array([10.0, -0.5]), step_size=0.1)
    # bias correction makes the first increment step_size * sign(g) (up to eps)
    assert np.allclose(inc, [0.1, -0.1], atol=1e-6)
    assert state.t == 1


def test_maximize_monotone_converges_on_quadratic():
    x, trace = maximize_monotone(quad, np.array([-3.0, 6.0]), max_iter=5000, step_size=0.05, tol=1e-12, patience=20)
    assert np.allclose(x, 2.0, atol=1e-4)
    assert trace[-1] > trace[0]


def test_trace_never_decreases():
    rng = np.random.Generator(np.random.Philox(0))

    def bumpy(x):
        v = -float(np.sum(x**2)) + 0.05 * float(np.sin(40.0 * x[0]))
        g = -2.0 * x
        g[0] += 2.0 * np.cos(40.0 * x[0])
        return v, g

    _, trace = maximize_monotone(bumpy, rng.normal(size=3), max_iter=400, step_size=0.1, tol=0.0, patience=10**9)
    diffs = np.diff(np.array(trace))
    assert np.all(diffs >= 0.0)


def test_zero_iterations_returns_start():
    x0 = np.array([1.0, 2.0])
    x, trace = maximize_monotone(quad, x0, max_iter=0, step_size=0.1, tol=1e-8, patience=5)
    assert np.array_equal(x, x0)
    assert len(trace) == 1


def test_nonfinite_start_raises():
    def bad(x):
        return -np.inf, np.zeros_like(x)

    with pytest.raises(NumericalDegeneracyError):
        maximize_monotone(bad, np.zeros(2), max_iter=10, step_size=0.1, tol=1e-8, patience=5)
