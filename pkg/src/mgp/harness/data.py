"""Synthetic regression data and a small CSV format.

The CSV layout is ``x1,...,xd,y``: one header line, one row per
observation, floats printed with ``%.17g`` so a save/load round trip is
exact. Generators are one-dimensional test functions with additive
Gaussian noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..validation import as_matrix, as_vector, check_matching_rows

_TRUTHS = {
    "sin2x": lambda x: np.sin(2.0 * x),
    "quadratic": lambda x: x * x,
    "linear": lambda x: x,
}


def generator_tags() -> tuple[str, ...]:
    return tuple(sorted(_TRUTHS))


@dataclass(frozen=True)
class GeneratorSpec:
    """Recipe for a simulated data set; enough to reproduce it exactly."""

    tag: str
    n: int
    sigma: float
    seed: int
    lo: float = -4.0
    hi: float = 4.0

    def __post_init__(self) -> None:
        if self.tag not in _TRUTHS:
            raise ValueError(f"unknown generator tag {self.tag!r}; choose from {generator_tags()}")
        if self.n < 1:
            raise ValueError(f"need n >= 1, got {self.n}")
        if not self.sigma >= 0.0:
            raise ValueError(f"noise sd must be >= 0, got {self.sigma}")
        if not self.hi > self.lo:
            raise ValueError(f"empty input range [{self.lo}, {self.hi}]")

    def truth(self, x: np.ndarray) -> np.ndarray:
        """Noise-free target values at ``x`` (any shape, applied elementwise)."""
        return _TRUTHS[self.tag](np.asarray(x, dtype=float))

    def to_dict(self) -> dict:
        return {
            "tag": self.tag,
            "n": self.n,
            "sigma": self.sigma,
            "seed": self.seed,
            "range": [self.lo, self.hi],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "GeneratorSpec":
        lo, hi = doc.get("range", (-4.0, 4.0))
        return cls(
            tag=doc["tag"],
            n=int(doc["n"]),
            sigma=float(doc["sigma"]),
            seed=int(doc["seed"]),
            lo=float(lo),
            hi=float(hi),
        )


@dataclass(frozen=True, eq=False)
class Dataset:
    """Inputs, targets, and (when simulated) the recipe that produced them."""

    X: np.ndarray
    y: np.ndarray
    generator: GeneratorSpec | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "X", as_matrix(self.X, "X"))
        object.__setattr__(self, "y", as_vector(self.y, "y"))
        check_matching_rows(self.X, self.y)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def input_dim(self) -> int:
        return self.X.shape[1]


def simulate(tag: str, n: int, sigma: float, seed: int, lo: float = -4.0, hi: float = 4.0) -> Dataset:
    """Draw ``n`` points uniformly on ``[lo, hi]`` and add Gaussian noise.

    The same (tag, n, sigma, seed, lo, hi) always yields the same bytes:
    inputs come from a counter-based generator keyed only by ``seed``.
    """
    spec = GeneratorSpec(tag=tag, n=n, sigma=sigma, seed=seed, lo=lo, hi=hi)
    return simulate_from_spec(spec)


def simulate_from_spec(spec: GeneratorSpec) -> Dataset:
    rng = np.random.Generator(np.random.Philox(spec.seed))
    x = rng.uniform(spec.lo, spec.hi, size=spec.n)
    y = spec.truth(x) + spec.sigma * rng.standard_normal(spec.n)
    return Dataset(X=x[:, None], y=y, generator=spec)


def _header(d: int) -> str:
    return ",".join([f"x{j + 1}" for j in range(d)] + ["y"])


def dataset_csv(dataset: Dataset) -> str:
    """The ``x1,...,xd,y`` text of a data set, floats at full precision."""
    rows = [_header(dataset.input_dim)]
    for i in range(dataset.n):
        cells = [f"{v:.17g}" for v in dataset.X[i]] + [f"{dataset.y[i]:.17g}"]
        rows.append(",".join(cells))
    return "\n".join(rows) + "\n"


def save_csv(dataset: Dataset, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dataset_csv(dataset))


def load_csv(path: str) -> Dataset:
    """Read a data CSV written by :func:`save_csv` (or shaped like one).

    Raises ValueError naming the offending line on a malformed header,
    a row of the wrong width, an unparseable cell, or a non-finite value.
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh]
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise ValueError(f"{path}: empty file")

    names = [c.strip() for c in lines[0].split(",")]
    d = len(names) - 1
    if d < 1 or names != [f"x{j + 1}" for j in range(d)] + ["y"]:
        raise ValueError(f"{path}, line 1: expected header like {_header(max(d, 1))!r}, got {lines[0]!r}")
    if len(lines) == 1:
        raise ValueError(f"{path}: no data rows")

    X = np.empty((len(lines) - 1, d))
    y = np.empty(len(lines) - 1)
    for i, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != d + 1:
            raise ValueError(f"{path}, line {i}: expected {d + 1} fields, got {len(cells)}")
        try:
            vals = [float(c) for c in cells]
        except ValueError:
            raise ValueError(f"{path}, line {i}: unparseable value in {line!r}") from None
        if not all(np.isfinite(vals)):
            raise ValueError(f"{path}, line {i}: non-finite value in {line!r}")
        X[i - 2] = vals[:d]
        y[i - 2] = vals[d]
    return Dataset(X=X, y=y)
