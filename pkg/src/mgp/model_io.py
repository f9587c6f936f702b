"""Model persistence.

Both model kinds serialize to a single JSON document. An exact model file
records the (fitted) prior in the natural domain, a fingerprint of the
training data, and the posterior weights; prediction from it needs the
original training data again, which is verified against the fingerprint.
A sparse model file additionally records the variational state and is
self-contained for prediction.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .exact_mgp import ExactMGPPosterior, MGPComponent, MGPPrior
from .kernels import GramOptions, kernel_from_config, kernel_to_config, mean_from_config, mean_to_config
from .svmgp import SVMGPComponent, SVMGPModel
from .validation import as_matrix, as_vector

FORMAT = "mgp-model"
VERSION = 1


def data_fingerprint(X, y) -> dict:
    """Shape plus a content checksum of a training set."""
    X = as_matrix(X)
    y = as_vector(y)
    h = hashlib.sha256()
    h.update(np.int64(X.shape[0]).tobytes())
    h.update(np.int64(X.shape[1]).tobytes())
    h.update(np.ascontiguousarray(X).tobytes())
    h.update(np.ascontiguousarray(y).tobytes())
    return {"n": X.shape[0], "d": X.shape[1], "sha256": h.hexdigest()}


def check_fingerprint(fp: dict, X, y) -> None:
    actual = data_fingerprint(X, y)
    if actual != fp:
        raise ValueError(
            "training data does not match the fingerprint stored with the model "
            f"(stored n={fp.get('n')}, d={fp.get('d')}; given n={actual['n']}, d={actual['d']})"
        )


def _dump(path, doc: dict) -> None:
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _load(path) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ValueError(f"{path}: not a valid model file: {e}") from None
    if not isinstance(doc, dict) or doc.get("format") != FORMAT:
        raise ValueError(f"{path}: not a {FORMAT} document")
    if doc.get("version") != VERSION:
        raise ValueError(f"{path}: unsupported model file version {doc.get('version')!r}")
    return doc


def save_exact_model(path, posterior: ExactMGPPosterior) -> None:
    prior = posterior.prior
    doc = {
        "format": FORMAT,
        "version": VERSION,
        "kind": "exact",
        "noise_variance": prior.noise_variance,
        "jitter_scale": prior.gram_opts.jitter_scale,
        "components": [
            {
                "name": c.name,
                "weight": c.weight,
                "kernel": kernel_to_config(c.kernel),
                "mean": mean_to_config(c.mean),
            }
            for c in prior.components
        ],
        "training_data": data_fingerprint(posterior.X, posterior.y),
        "posterior_weights": posterior.weights.tolist(),
        "log_marginal_likelihood": posterior.log_marginal_likelihood,
    }
    _dump(path, doc)


def save_svmgp_model(path, model: SVMGPModel, fingerprint: dict | None = None, weights=None) -> None:
    doc = {
        "format": FORMAT,
        "version": VERSION,
        "kind": "svmgp",
        "noise_variance": model.noise_variance,
        "jitter_scale": model.gram_opts.jitter_scale,
        "alpha": model.alpha.tolist(),
        "alpha_tilde": model.alpha_tilde.tolist(),
        "components": [
            {
                "name": c.name,
                "kernel": kernel_to_config(c.kernel),
                "mean": mean_to_config(c.mean),
                "inducing": c.inducing.tolist(),
                "q_mean": c.q_mean.tolist(),
                "q_sqrt": c.q_sqrt.tolist(),
            }
            for c in model.components
        ],
        "posterior_weights": (model.weights if weights is None else np.asarray(weights)).tolist(),
    }
    if fingerprint is not None:
        doc["training_data"] = fingerprint
    _dump(path, doc)


def load_model(path):
    """Load either model kind.

    Returns ("exact", prior, doc) or ("svmgp", model, doc); the raw document
    gives access to the fingerprint and stored posterior weights.
    """
    doc = _load(path)
    opts = GramOptions(doc.get("jitter_scale", 1e-6))
    if doc["kind"] == "exact":
        comps = tuple(
            MGPComponent(
                name=c["name"],
                kernel=kernel_from_config(c["kernel"]),
                weight=c["weight"],
                mean=mean_from_config(c["mean"]),
            )
            for c in doc["components"]
        )
        prior = MGPPrior(comps, doc["noise_variance"], opts)
        return "exact", prior, doc
    if doc["kind"] == "svmgp":
        comps = tuple(
            SVMGPComponent(
                name=c["name"],
                kernel=kernel_from_config(c["kernel"]),
                inducing=np.asarray(c["inducing"], dtype=float),
                q_mean=np.asarray(c["q_mean"], dtype=float),
                q_sqrt=np.asarray(c["q_sqrt"], dtype=float),
                mean=mean_from_config(c["mean"]),
            )
            for c in doc["components"]
        )
        model = SVMGPModel(
            components=comps,
            alpha=np.asarray(doc["alpha"], dtype=float),
            alpha_tilde=np.asarray(doc["alpha_tilde"], dtype=float),
            noise_variance=doc["noise_variance"],
            gram_opts=opts,
        )
        return "svmgp", model, doc
    raise ValueError(f"{path}: unknown model kind {doc['kind']!r}")
