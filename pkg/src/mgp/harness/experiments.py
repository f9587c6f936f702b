"""Preset experiments: build a model from a config, fit, predict, score.

A config is plain JSON-able data so runs can be archived and repeated.
Kernel parameters may be given in full, in part, or omitted entirely;
whatever is missing is filled from the usual data-driven initialisation,
so presets stay short while still pinning the values that matter (the
oscillation period, say).
"""

from __future__ import annotations

import dataclasses
import json
import time
from dataclasses import dataclass, field

import numpy as np

from ..exact_mgp import (
    ExactMGPPosterior,
    MGPComponent,
    MGPPrior,
    TrainConfig,
    condition_on_data,
    default_noise_variance,
    heuristic_kernel,
)
from ..exact_mgp import fit as fit_exact
from ..gaussmix import GaussianMixture
from ..kernels import Kernel, MeanFunction, ZeroMean, kernel_from_config, mean_from_config
from ..svmgp import SVMGPModel, SVMGPTrainConfig, init_model
from ..svmgp import predict_y as svmgp_predict_y
from ..svmgp import train as train_svmgp
from ..validation import as_matrix
from .data import Dataset, GeneratorSpec, load_csv, simulate_from_spec
from .metrics import metrics, pointwise_mean_sd

KINDS = ("exact", "svmgp")


_KERNEL_FIELDS = {
    "ard_se": ("signal_variance", "lengthscales"),
    "linear": ("bias_variance", "weight_variance"),
    "periodic": ("signal_variance", "lengthscale", "period"),
}


def _build_kernel(cfg: dict, X: np.ndarray, y: np.ndarray) -> Kernel:
    kind = cfg["kind"]
    if kind not in _KERNEL_FIELDS:
        raise ValueError(f"unknown kernel kind {kind!r}; choose from {tuple(_KERNEL_FIELDS)}")
    overrides = dict(cfg.get("params", {}))
    if "lengthscales" in overrides:
        overrides["lengthscales"] = tuple(float(v) for v in overrides["lengthscales"])
    # a fully specified kernel must not depend on data statistics
    if set(overrides) >= set(_KERNEL_FIELDS[kind]):
        return kernel_from_config({"kind": kind, "params": overrides})
    return dataclasses.replace(heuristic_kernel(kind, X, y), **overrides)


def _build_mean(cfg: dict | None) -> MeanFunction:
    if cfg is None:
        return ZeroMean()
    return mean_from_config(cfg)


@dataclass(frozen=True)
class ModelConfig:
    """What to fit: component pool, prior weights or concentrations, training knobs."""

    kind: str
    components: tuple[dict, ...]
    alpha: tuple[float, ...] | None = None
    noise_variance: float | None = None
    train: dict = field(default_factory=dict)
    inducing_per_component: int = 3

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"model kind must be one of {KINDS}, got {self.kind!r}")
        if not self.components:
            raise ValueError("need at least one component")
        if self.kind == "svmgp":
            alpha = self.alpha if self.alpha is not None else (1.0,) * len(self.components)
            object.__setattr__(self, "alpha", tuple(float(a) for a in alpha))
            if len(self.alpha) != len(self.components):
                raise ValueError(f"{len(self.components)} components but {len(self.alpha)} concentrations")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "components": [dict(c) for c in self.components],
            "alpha": list(self.alpha) if self.alpha is not None else None,
            "noise_variance": self.noise_variance,
            "train": dict(self.train),
            "inducing_per_component": self.inducing_per_component,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ModelConfig":
        return cls(
            kind=doc["kind"],
            components=tuple(doc["components"]),
            alpha=tuple(doc["alpha"]) if doc.get("alpha") is not None else None,
            noise_variance=doc.get("noise_variance"),
            train=dict(doc.get("train", {})),
            inducing_per_component=int(doc.get("inducing_per_component", 3)),
        )


@dataclass(frozen=True, eq=False)
class FittedModel:
    """Uniform handle over the two model kinds, for prediction and reporting."""

    kind: str
    prior_weights_or_alpha: tuple[float, ...]
    posterior_weights: np.ndarray
    objective_trace: tuple[float, ...]
    exact_posterior: ExactMGPPosterior | None = None
    svmgp: SVMGPModel | None = None

    def component_names(self) -> tuple[str, ...]:
        if self.kind == "exact":
            return tuple(c.name for c in self.exact_posterior.prior.components)
        return tuple(c.name for c in self.svmgp.components)

    def predict_y(self, Xs: np.ndarray) -> GaussianMixture:
        if self.kind == "exact":
            return self.exact_posterior.predict_y(Xs)
        return svmgp_predict_y(self.svmgp, Xs)


def fit_model(cfg: ModelConfig, X: np.ndarray, y: np.ndarray, seed: int | None = None) -> FittedModel:
    """Build the configured model around (X, y) and train it.

    ``seed`` overrides the minibatch shuffling seed for the variational
    kind; the exact kind is deterministic and ignores it.
    """
    X = as_matrix(X, "X")
    noise = cfg.noise_variance if cfg.noise_variance is not None else default_noise_variance(y)
    names = [c.get("name", f"c{i}") for i, c in enumerate(cfg.components)]
    if len(set(names)) != len(names):
        raise ValueError(f"component names must be unique, got {names}")
    kernels = [_build_kernel(c["kernel"], X, y) for c in cfg.components]
    means = [_build_mean(c.get("mean")) for c in cfg.components]

    if cfg.kind == "exact":
        weights = np.array([float(c.get("weight", 1.0 / len(cfg.components))) for c in cfg.components])
        prior = MGPPrior(
            components=tuple(
                MGPComponent(name=nm, kernel=k, weight=w, mean=m)
                for nm, k, w, m in zip(names, kernels, weights, means)
            ),
            noise_variance=noise,
        )
        train_cfg = TrainConfig(**cfg.train)
        fitted, trace = fit_exact(prior, X, y, train_cfg)
        posterior = condition_on_data(fitted, X, y)
        return FittedModel(
            kind="exact",
            prior_weights_or_alpha=tuple(float(w) for w in weights),
            posterior_weights=posterior.weights,
            objective_trace=tuple(trace),
            exact_posterior=posterior,
        )

    train_kwargs = dict(cfg.train)
    if seed is not None:
        train_kwargs["seed"] = seed
    if "batch_size" in train_kwargs:
        train_kwargs["batch_size"] = min(int(train_kwargs["batch_size"]), X.shape[0])
    train_cfg = SVMGPTrainConfig(**train_kwargs)
    model = init_model(
        priors=list(zip(means, kernels)),
        alpha=cfg.alpha,
        X=X,
        y=y,
        m_per_component=cfg.inducing_per_component,
        names=names,
        noise_variance=noise,
    )
    model, trace = train_svmgp(model, X, y, train_cfg)
    return FittedModel(
        kind="svmgp",
        prior_weights_or_alpha=cfg.alpha,
        posterior_weights=model.weights,
        objective_trace=tuple(trace),
        svmgp=model,
    )


@dataclass(frozen=True)
class ExperimentConfig:
    """A full run: data source, model, prediction grid, held-out scoring."""

    model: ModelConfig
    data: dict
    grid: tuple[float, float, int] = (-4.0, 4.0, 401)
    holdout: dict | None = None
    preset: str | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if ("generator" in self.data) == ("path" in self.data):
            raise ValueError("data must name exactly one of 'generator' or 'path'")
        lo, hi, num = self.grid
        if not (hi > lo and int(num) >= 2):
            raise ValueError(f"bad grid {self.grid}")
        object.__setattr__(self, "grid", (float(lo), float(hi), int(num)))

    def to_dict(self) -> dict:
        return {
            "preset": self.preset,
            "seed": self.seed,
            "model": self.model.to_dict(),
            "data": dict(self.data),
            "grid": {"lo": self.grid[0], "hi": self.grid[1], "n": self.grid[2]},
            "holdout": dict(self.holdout) if self.holdout is not None else None,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        grid = doc.get("grid", {"lo": -4.0, "hi": 4.0, "n": 401})
        return cls(
            model=ModelConfig.from_dict(doc["model"]),
            data=dict(doc["data"]),
            grid=(grid["lo"], grid["hi"], grid["n"]),
            holdout=dict(doc["holdout"]) if doc.get("holdout") is not None else None,
            preset=doc.get("preset"),
            seed=int(doc.get("seed", 0)),
        )

    def with_seed(self, seed: int) -> "ExperimentConfig":
        """Re-key every stochastic ingredient off a fresh base seed.

        Data, training, and holdout seeds stay distinct (seed, seed+1,
        seed+2) so no stream is reused across roles.
        """
        data = dict(self.data)
        if "generator" in data:
            data["generator"] = {**data["generator"], "seed": seed}
        train = dict(self.model.train)
        if self.model.kind == "svmgp":
            train["seed"] = seed + 1
        holdout = {**self.holdout, "seed": seed + 2} if self.holdout is not None else None
        return dataclasses.replace(
            self,
            model=dataclasses.replace(self.model, train=train),
            data=data,
            holdout=holdout,
            seed=seed,
        )


def preset_config(name: str, seed: int = 0) -> ExperimentConfig:
    """Named experiment setups covering the behaviours worth demonstrating.

    fig1: small-data pooling of a linear and a smooth component; the data
        are periodic-ish, so the smooth component should take the weight.
    fig2: extrapolation. Train on the right half of the range with a
        periodic+smooth pool, score on the unseen left half.
    fig3: large n with the variational model and a three-way pool under a
        symmetric Dirichlet prior.
    """
    se = {"name": "se", "kernel": {"kind": "ard_se"}}
    linear = {"name": "linear", "kernel": {"kind": "linear"}}
    periodic = {"name": "periodic", "kernel": {"kind": "periodic", "params": {"period": 3.0}}}
    if name == "fig1":
        cfg = ExperimentConfig(
            model=ModelConfig(
                kind="exact",
                components=({**linear, "weight": 0.5}, {**se, "weight": 0.5}),
            ),
            data={"generator": {"tag": "sin2x", "n": 40, "sigma": 0.2, "seed": 0, "range": [-4.0, 4.0]}},
            holdout={"tag": "sin2x", "n": 200, "sigma": 0.2, "seed": 2, "range": [-4.0, 4.0]},
            preset="fig1",
        )
    elif name == "fig2":
        cfg = ExperimentConfig(
            model=ModelConfig(
                kind="exact",
                components=({**periodic, "weight": 0.8}, {**se, "weight": 0.2}),
            ),
            data={"generator": {"tag": "sin2x", "n": 30, "sigma": 0.2, "seed": 0, "range": [0.0, 4.0]}},
            holdout={"tag": "sin2x", "n": 200, "sigma": 0.2, "seed": 2, "range": [-4.0, 0.0]},
            preset="fig2",
        )
    elif name == "fig3":
        cfg = ExperimentConfig(
            model=ModelConfig(
                kind="svmgp",
                components=(linear, periodic, se),
                alpha=(3.0, 3.0, 3.0),
                train={"batch_size": 256, "max_epochs": 200, "step_size": 0.01, "seed": 1},
                inducing_per_component=3,
            ),
            data={"generator": {"tag": "sin2x", "n": 10000, "sigma": 0.2, "seed": 0, "range": [-4.0, 4.0]}},
            holdout={"tag": "sin2x", "n": 500, "sigma": 0.2, "seed": 2, "range": [-4.0, 4.0]},
            preset="fig3",
        )
    else:
        raise ValueError(f"unknown preset {name!r}; choose from ('fig1', 'fig2', 'fig3')")
    return cfg.with_seed(seed)


@dataclass(frozen=True)
class PredictionRecord:
    """One grid point: pooled predictive, truth if known, per-component predictives."""

    x: float
    mean: float
    sd: float
    truth_mean: float
    truth_sd: float
    component_means: tuple[float, ...]
    component_sds: tuple[float, ...]


def _resolve_dataset(data: dict) -> Dataset:
    if "generator" in data:
        return simulate_from_spec(GeneratorSpec.from_dict(data["generator"]))
    return load_csv(data["path"])


def grid_predictions(
    fitted: FittedModel, grid: tuple[float, float, int], generator: GeneratorSpec | None
) -> list[PredictionRecord]:
    lo, hi, num = grid
    return predictions_at(fitted, np.linspace(lo, hi, num), generator)


def predictions_at(
    fitted: FittedModel, xs: np.ndarray, generator: GeneratorSpec | None = None
) -> list[PredictionRecord]:
    xs = np.asarray(xs, dtype=float).reshape(-1)
    num = xs.shape[0]
    mixture = fitted.predict_y(xs[:, None])
    mean, sd = pointwise_mean_sd(mixture)
    comp_means = np.stack([c.mean for c in mixture.components])
    comp_sds = np.sqrt(np.stack([np.diag(c.cov) for c in mixture.components]))
    if generator is not None:
        truth_mean = generator.truth(xs)
        truth_sd = np.full(num, generator.sigma)
    else:
        truth_mean = np.full(num, np.nan)
        truth_sd = np.full(num, np.nan)
    return [
        PredictionRecord(
            x=float(xs[j]),
            mean=float(mean[j]),
            sd=float(sd[j]),
            truth_mean=float(truth_mean[j]),
            truth_sd=float(truth_sd[j]),
            component_means=tuple(float(v) for v in comp_means[:, j]),
            component_sds=tuple(float(v) for v in comp_sds[:, j]),
        )
        for j in range(num)
    ]


def predictions_csv(records: list[PredictionRecord]) -> str:
    k = len(records[0].component_means)
    header = ["x", "mean", "sd", "truth_mean", "truth_sd"]
    for i in range(1, k + 1):
        header += [f"comp{i}_mean", f"comp{i}_sd"]
    lines = [",".join(header)]
    for r in records:
        cells = [r.x, r.mean, r.sd, r.truth_mean, r.truth_sd]
        for cm, cs in zip(r.component_means, r.component_sds):
            cells += [cm, cs]
        lines.append(",".join(f"{v:.17g}" for v in cells))
    return "\n".join(lines) + "\n"


def predictions_to_csv(records: list[PredictionRecord], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(predictions_csv(records))


def run_experiment(config: ExperimentConfig, out_dir: str | None = None) -> tuple[list[PredictionRecord], dict]:
    """Fit, predict on the grid, score on the holdout, optionally write artifacts.

    Writes ``predictions.csv`` and ``summary.json`` under ``out_dir`` when
    given. Everything in both files except ``wall_time_seconds`` is a pure
    function of the config.
    """
    dataset = _resolve_dataset(config.data)
    start = time.perf_counter()
    fitted = fit_model(config.model, dataset.X, dataset.y)
    wall = time.perf_counter() - start

    records = grid_predictions(fitted, config.grid, dataset.generator)

    scores: dict[str, float | None] = {"rmse": None, "nlpd": None}
    if config.holdout is not None:
        held = simulate_from_spec(GeneratorSpec.from_dict(config.holdout))
        scores = metrics(fitted.predict_y(held.X), held.y)

    summary = {
        "preset": config.preset,
        "seed": config.seed,
        "model_kind": config.model.kind,
        "prior_weights_or_alpha": list(fitted.prior_weights_or_alpha),
        "posterior_weights": [float(w) for w in fitted.posterior_weights],
        "objective_trace": [float(v) for v in fitted.objective_trace],
        "rmse": scores["rmse"],
        "nlpd": scores["nlpd"],
        "wall_time_seconds": wall,
    }
    if out_dir is not None:
        import os

        os.makedirs(out_dir, exist_ok=True)
        predictions_to_csv(records, os.path.join(out_dir, "predictions.csv"))
        with open(os.path.join(out_dir, "summary.json"), "w", encoding="utf-8") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return records, summary
