"""Versioned JSON model files.

Serialization is canonical (sorted keys, compact separators, shortest
round-trip float repr), so loading and re-saving a file reproduces it
byte for byte and equal models always produce equal files.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .dataset import FeatureSet
from .errors import ModelFormatError, ModelVersionError
from .learners import ForestModel, LogisticModel, Model, NaiveBayesModel, TreeModel

FORMAT = "equityforecast-model"
VERSION = 1

_TREE_FIELDS = ("feature", "threshold", "left", "right", "missing_left", "good", "bad")


@dataclass(frozen=True, eq=False)
class ModelFile:
    model: Model
    metadata: dict[str, Any] = field(default_factory=dict)


def _tree_params(tree: TreeModel) -> dict:
    return {name: getattr(tree, name).tolist() for name in _TREE_FIELDS}


def _tree_from(params: dict, features: FeatureSet, hyper: dict, algorithm: str) -> TreeModel:
    return TreeModel(features, *(params[name] for name in _TREE_FIELDS), params=hyper, algorithm=algorithm)


def _parameters(model: Model) -> dict:
    if isinstance(model, TreeModel):
        return _tree_params(model)
    if isinstance(model, ForestModel):
        return {"seed": model.seed, "trees": [_tree_params(t) for t in model.trees]}
    if isinstance(model, NaiveBayesModel):
        return {
            "priors": model.priors.tolist(), "mean": model.mean.tolist(),
            "var": model.var.tolist(), "usable": model.usable.tolist(),
        }
    if isinstance(model, LogisticModel):
        return {
            "weights": model.weights.tolist(), "intercept": model.intercept,
            "center": model.center.tolist(), "scale": model.scale.tolist(),
            "impute": model.impute.tolist(), "n_iter": model.n_iter, "grad_norm": model.grad_norm,
        }
    raise TypeError(f"cannot serialize {type(model).__name__}")


def _model_from(doc: dict) -> Model:
    algorithm = doc["algorithm"]
    features = FeatureSet(doc["features"])
    hyper = doc["hyperparameters"]
    p = doc["parameters"]
    if algorithm in ("c45_tree", "random_tree"):
        return _tree_from(p, features, hyper, algorithm)
    if algorithm == "random_forest":
        tree_hyper = {k: hyper[k] for k in ("k", "min_leaf", "max_depth")}
        trees = tuple(_tree_from(t, features, tree_hyper, "random_tree") for t in p["trees"])
        return ForestModel(features, trees, p["seed"], hyper)
    if algorithm == "naive_bayes":
        return NaiveBayesModel(features, p["priors"], p["mean"], p["var"], p["usable"])
    if algorithm == "logistic":
        return LogisticModel(features, p["weights"], p["intercept"], p["center"], p["scale"], p["impute"],
                             params=hyper, n_iter=p["n_iter"], grad_norm=p["grad_norm"])
    raise ModelFormatError(f"unknown algorithm {algorithm!r}")


def dumps(model: Model, metadata: dict[str, Any] | None = None) -> str:
    doc = {
        "format": FORMAT,
        "version": VERSION,
        "algorithm": model.algorithm,
        "hyperparameters": dict(model.params),
        "features": list(model.features),
        "parameters": _parameters(model),
        "metadata": dict(metadata or {}),
    }
    try:
        text = json.dumps(doc, sort_keys=True, separators=(",", ":"), allow_nan=False)
    except (TypeError, ValueError) as exc:  # pragma: no cover - a bug, not an input error
        raise AssertionError(f"model state is not serializable: {exc}") from exc
    return text + "\n"


def loads(text: str) -> ModelFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"not a model file: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != FORMAT:
        raise ModelFormatError("not a model file: missing format marker")
    if doc.get("version") != VERSION:
        raise ModelVersionError(f"model file version {doc.get('version')!r} is not supported (expected {VERSION})")
    try:
        model = _model_from(doc)
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"corrupt model file: {exc}") from exc
    return ModelFile(model, doc.get("metadata", {}))


def digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def model_digest(model: Model) -> str:
    """Content hash of a model's canonical serialization (no metadata)."""
    return digest(dumps(model))


def save_model(model: Model, path: str | os.PathLike, metadata: dict[str, Any] | None = None) -> str:
    """Write ``model`` to ``path``; returns the file's SHA-256."""
    text = dumps(model, metadata)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return digest(text)


def load_model_file(path: str | os.PathLike) -> ModelFile:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def load_model(path: str | os.PathLike) -> Model:
    return load_model_file(path).model


def save_model_file(model_file: ModelFile, path: str | os.PathLike) -> str:
    return save_model(model_file.model, path, model_file.metadata)


def as_python(value: Any) -> Any:
    """numpy scalars to plain Python, for metadata values."""
    return value.item() if isinstance(value, np.generic) else value
