"""Command-line front end.

Subcommands: ``simulate``, ``fit``, ``predict``, ``eval``, ``experiment``.
Results go to ``--out`` (or stdout where that makes sense); progress and
diagnostics go to stderr. Exit codes: 0 on success, 1 on a usage or input
problem, 2 on a numerical failure inside a model.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .. import __version__
from ..errors import NumericalDegeneracyError
from ..exact_mgp import condition_on_data
from ..model_io import check_fingerprint, data_fingerprint, load_model, save_exact_model, save_svmgp_model
from .data import dataset_csv, generator_tags, load_csv, save_csv, simulate
from .experiments import (
    ExperimentConfig,
    FittedModel,
    ModelConfig,
    fit_model,
    predictions_at,
    predictions_csv,
    predictions_to_csv,
    preset_config,
    run_experiment,
)
from .metrics import metrics


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _say(text: str) -> None:
    print(text, file=sys.stderr)


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as e:
        raise ValueError(f"{path}: invalid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise ValueError(f"{path}: expected a JSON object")
    return doc


def _weight_report(names, weights) -> str:
    return ", ".join(f"{nm}={w:.4f}" for nm, w in zip(names, weights))


def _cmd_simulate(args) -> int:
    data = simulate(args.tag, args.n, args.sigma, args.seed, args.lo, args.hi)
    if args.out is None:
        sys.stdout.write(dataset_csv(data))
    else:
        save_csv(data, args.out)
        _say(f"wrote {data.n} points to {args.out}")
    return 0


def _cmd_fit(args) -> int:
    cfg = ModelConfig.from_dict(_load_json(args.config))
    data = load_csv(args.data)
    fitted = fit_model(cfg, data.X, data.y, seed=args.seed)
    if fitted.kind == "exact":
        save_exact_model(args.out, fitted.exact_posterior)
    else:
        save_svmgp_model(args.out, fitted.svmgp, fingerprint=data_fingerprint(data.X, data.y))
    trace = fitted.objective_trace
    _say(
        f"fit {fitted.kind} model on {data.n} points: objective {trace[0]:.4f} -> {trace[-1]:.4f} "
        f"({len(trace) - 1} steps)"
    )
    _say(f"posterior weights: {_weight_report(fitted.component_names(), fitted.posterior_weights)}")
    _say(f"wrote model to {args.out}")
    return 0


def _load_fitted(args) -> FittedModel:
    """Rebuild a FittedModel from a model file (plus training data when needed)."""
    kind, obj, doc = load_model(args.model)
    if kind == "exact":
        if args.train_data is None:
            raise ValueError("an exact model file needs --train-data to predict (it stores no posterior state)")
        data = load_csv(args.train_data)
        check_fingerprint(doc["training_data"], data.X, data.y)
        posterior = condition_on_data(obj, data.X, data.y)
        return FittedModel(
            kind="exact",
            prior_weights_or_alpha=tuple(c.weight for c in obj.components),
            posterior_weights=posterior.weights,
            objective_trace=(),
            exact_posterior=posterior,
        )
    return FittedModel(
        kind="svmgp",
        prior_weights_or_alpha=tuple(obj.alpha.tolist()),
        posterior_weights=obj.weights,
        objective_trace=(),
        svmgp=obj,
    )


def _prediction_inputs(args) -> np.ndarray:
    if args.grid is not None:
        lo, hi, num = args.grid
        if not (hi > lo and int(num) >= 2):
            raise ValueError(f"bad grid: lo={lo} hi={hi} n={num}")
        return np.linspace(lo, hi, int(num))
    data = load_csv(args.data)
    if data.input_dim != 1:
        raise ValueError("the prediction CSV format is one-dimensional; use the library API for d > 1")
    return data.X[:, 0]


def _cmd_predict(args) -> int:
    fitted = _load_fitted(args)
    xs = _prediction_inputs(args)
    records = predictions_at(fitted, xs)
    if args.out is None:
        sys.stdout.write(predictions_csv(records))
    else:
        predictions_to_csv(records, args.out)
        _say(f"wrote {len(records)} predictions to {args.out}")
    return 0


def _cmd_eval(args) -> int:
    fitted = _load_fitted(args)
    data = load_csv(args.data)
    scores = metrics(fitted.predict_y(data.X), data.y)
    doc = {"n": data.n, "nlpd": scores["nlpd"], "rmse": scores["rmse"]}
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        _say(f"wrote scores to {args.out}")
    return 0


def _cmd_experiment(args) -> int:
    if args.preset is not None:
        config = preset_config(args.preset, seed=args.seed if args.seed is not None else 0)
    else:
        config = ExperimentConfig.from_dict(_load_json(args.config))
        if args.seed is not None:
            config = config.with_seed(args.seed)
    _, summary = run_experiment(config, out_dir=args.out)
    label = config.preset or args.config
    _say(f"experiment {label}: {summary['model_kind']} model, seed {summary['seed']}")
    _say(f"posterior weights: {[round(w, 4) for w in summary['posterior_weights']]}")
    if summary["rmse"] is not None:
        _say(f"holdout rmse {summary['rmse']:.4f}, nlpd {summary['nlpd']:.4f}")
    _say(f"wall time {summary['wall_time_seconds']:.2f}s; artifacts in {args.out}")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="mgp", description="Mixture-of-Gaussian-process regression tools.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("simulate", help="draw a synthetic data set and write it as CSV")
    p.add_argument("--tag", required=True, choices=generator_tags(), help="test function")
    p.add_argument("--n", type=int, required=True, help="number of points")
    p.add_argument("--sigma", type=float, default=0.2, help="noise standard deviation")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lo", type=float, default=-4.0, help="lower end of the input range")
    p.add_argument("--hi", type=float, default=4.0, help="upper end of the input range")
    p.add_argument("--out", help="output CSV path (default: stdout)")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("fit", help="fit a model described by a JSON config to a data CSV")
    p.add_argument("--config", required=True, help="model config JSON")
    p.add_argument("--data", required=True, help="training data CSV")
    p.add_argument("--out", required=True, help="where to write the model file")
    p.add_argument("--seed", type=int, help="override the minibatch shuffling seed (svmgp only)")
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("predict", help="pooled predictive distribution from a model file")
    p.add_argument("--model", required=True, help="model file from `mgp fit`")
    where = p.add_mutually_exclusive_group(required=True)
    where.add_argument("--grid", nargs=3, type=float, metavar=("LO", "HI", "N"), help="evenly spaced inputs")
    where.add_argument("--data", help="CSV whose x column gives the inputs (y is ignored)")
    p.add_argument("--train-data", help="training CSV; required for exact models, checked against the model")
    p.add_argument("--out", help="output CSV path (default: stdout)")
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("eval", help="score a model file on a held-out data CSV")
    p.add_argument("--model", required=True, help="model file from `mgp fit`")
    p.add_argument("--data", required=True, help="held-out data CSV")
    p.add_argument("--train-data", help="training CSV; required for exact models")
    p.add_argument("--out", help="output JSON path (default: stdout)")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("experiment", help="run a named preset or a full experiment config")
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--preset", choices=("fig1", "fig2", "fig3"))
    which.add_argument("--config", help="experiment config JSON")
    p.add_argument("--seed", type=int, help="base seed (data, training, holdout derive from it)")
    p.add_argument("--out", required=True, help="directory for predictions.csv and summary.json")
    p.set_defaults(func=_cmd_experiment)

    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:  # argparse signals --help and usage errors this way
        return e.code if isinstance(e.code, int) else 1
    try:
        return args.func(args)
    except NumericalDegeneracyError as e:
        _say(f"mgp: numerical failure: {e}")
        return 2
    except (ValueError, KeyError, TypeError) as e:
        _say(f"mgp: error: {e}")
        return 1
    except OSError as e:
        _say(f"mgp: error: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
