"""Classifier roster with a common train / predict contract.

>>> spec = LearnerSpec("random_forest", {"n_trees": 50}, seed=7)
>>> model = train(spec, dataset)                       # doctest: +SKIP
>>> predict(model, dataset.X[0])                       # doctest: +SKIP
Prediction(label=<Label.GOOD: 1>, score=0.74)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping, Union

import numpy as np

from ..errors import TrainingError
from ..labeling import Label
from .forest import FOREST_DEFAULTS, ForestModel, train_random_forest
from .logistic import LOGISTIC_DEFAULTS, LogisticModel, train_logistic
from .naive_bayes import NaiveBayesModel, train_naive_bayes
from .tree import (
    RANDOM_TREE_DEFAULTS, TREE_DEFAULTS, TreeModel, entropy, gain_ratio, information_gain,
    split_information, train_c45, train_random_tree,
)

Model = Union[TreeModel, ForestModel, NaiveBayesModel, LogisticModel]

HYPERPARAMETERS = {
    "c45_tree": TREE_DEFAULTS,
    "random_tree": RANDOM_TREE_DEFAULTS,
    "random_forest": FOREST_DEFAULTS,
    "naive_bayes": {},
    "logistic": LOGISTIC_DEFAULTS,
}
ALGORITHMS = tuple(HYPERPARAMETERS)
RANDOMIZED = frozenset({"random_tree", "random_forest"})


@dataclass(frozen=True)
class LearnerSpec:
    algorithm: str
    hyperparameters: Mapping[str, Any] = field(default_factory=dict)
    seed: int | None = None

    def __post_init__(self):
        if self.algorithm not in HYPERPARAMETERS:
            raise TrainingError(f"unknown algorithm {self.algorithm!r}; choose from {', '.join(ALGORITHMS)}")
        unknown = sorted(set(self.hyperparameters) - set(HYPERPARAMETERS[self.algorithm]))
        if unknown:
            raise TrainingError(f"{self.algorithm}: unknown hyperparameter(s) {', '.join(unknown)}")
        if self.algorithm in RANDOMIZED and self.seed is None:
            raise TrainingError(f"{self.algorithm} is randomized and needs a seed")
        object.__setattr__(self, "hyperparameters", dict(self.hyperparameters))


@dataclass(frozen=True)
class Prediction:
    label: Label
    score: float  # probability of Good


def train(spec: LearnerSpec, dataset, threads: int = 1) -> Model:
    params = spec.hyperparameters
    if spec.algorithm == "c45_tree":
        return train_c45(dataset, params)
    if spec.algorithm == "random_tree":
        return train_random_tree(dataset, params, spec.seed)
    if spec.algorithm == "random_forest":
        return train_random_forest(dataset, params, spec.seed, threads=threads)
    if spec.algorithm == "naive_bayes":
        return train_naive_bayes(dataset, params)
    return train_logistic(dataset, params)


def predict_proba(model: Model, X: np.ndarray) -> np.ndarray:
    """Good-class scores for the rows of ``X``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != len(model.features):
        raise ValueError(f"expected {len(model.features)} features, got {X.shape[1]}")
    return model.predict_proba(X)


def labels_from_scores(scores: np.ndarray) -> np.ndarray:
    """1 (Good) where score >= 0.5; a score of exactly 0.5 counts as Good."""
    return (np.asarray(scores) >= 0.5).astype(np.int8)


def predict(model: Model, vector: np.ndarray) -> Prediction:
    vector = np.asarray(vector, dtype=float)
    if vector.ndim != 1:
        raise ValueError("predict takes a single feature vector; use predict_proba for batches")
    score = float(predict_proba(model, vector)[0])
    return Prediction(Label.GOOD if score >= 0.5 else Label.BAD, score)


__all__ = [
    "ALGORITHMS", "ForestModel", "LearnerSpec", "LogisticModel", "Model", "NaiveBayesModel",
    "Prediction", "TreeModel", "entropy", "gain_ratio", "information_gain", "labels_from_scores",
    "predict", "predict_proba", "split_information", "train", "train_c45", "train_logistic",
    "train_naive_bayes", "train_random_forest", "train_random_tree",
]
