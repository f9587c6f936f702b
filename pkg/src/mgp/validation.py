"""Input validation helpers.

Every public entry point funnels array arguments through these so that
shape and finiteness errors surface with a consistent message instead of
propagating as downstream linear-algebra failures.
"""

from __future__ import annotations

import numpy as np


def as_matrix(X, name: str = "X", *, require_finite: bool = True) -> np.ndarray:
    """Coerce ``X`` to a C-contiguous float64 matrix of shape (n, d).

    One-dimensional input is treated as a single column.
    """
    A = np.asarray(X, dtype=float)
    if A.ndim == 1:
        A = A[:, None]
    if A.ndim != 2:
        raise ValueError(f"{name} must be a 2-d array, got ndim={A.ndim}")
    if A.shape[0] == 0:
        raise ValueError(f"{name} must contain at least one row")
    if require_finite and not np.isfinite(A).all():
        raise ValueError(f"{name} contains NaN or Inf entries")
    return np.ascontiguousarray(A)


def as_vector(x, name: str = "y", *, require_finite: bool = True) -> np.ndarray:
    """Coerce ``x`` to a 1-d float64 vector."""
    v = np.asarray(x, dtype=float)
    if v.ndim == 2 and 1 in v.shape:
        v = v.ravel()
    if v.ndim != 1:
        raise ValueError(f"{name} must be a 1-d array, got ndim={v.ndim}")
    if require_finite and not np.isfinite(v).all():
        raise ValueError(f"{name} contains NaN or Inf entries")
    return np.ascontiguousarray(v)


def check_matching_rows(X: np.ndarray, y: np.ndarray, xname: str = "X", yname: str = "y") -> None:
    if X.shape[0] != y.shape[0]:
        raise ValueError(
            f"{xname} and {yname} disagree on the number of rows: "
            f"{X.shape[0]} vs {y.shape[0]}"
        )


def check_input_dim(expected: int | None, X: np.ndarray, who: str) -> None:
    """Validate the feature count of ``X`` against a declared input dim."""
    if expected is not None and X.shape[1] != expected:
        raise ValueError(
            f"{who} expects {expected}-dimensional inputs, got d={X.shape[1]}"
        )


def as_index_list(idx, dim: int, name: str = "indices") -> list[int]:
    """Validate an index sequence against a dimension; order is preserved."""
    out = [int(i) for i in np.asarray(idx).ravel()]
    if not out:
        raise ValueError(f"{name} must be non-empty")
    for i in out:
        if not 0 <= i < dim:
            raise ValueError(f"{name} entry {i} out of range for dimension {dim}")
    if len(set(out)) != len(out):
        raise ValueError(f"{name} contains duplicates")
    return out


def as_positive_float(x, name: str) -> float:
    v = float(x)
    if not np.isfinite(v) or v <= 0.0:
        raise ValueError(f"{name} must be a positive finite number, got {x!r}")
    return v


def readonly(a: np.ndarray) -> np.ndarray:
    """Return a read-only float64 copy (value semantics for stored arrays)."""
    out = np.array(a, dtype=float)
    out.setflags(write=False)
    return out
