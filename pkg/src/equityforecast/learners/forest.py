from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from ..dataset import FeatureSet
from ..errors import TrainingError
from .tree import RANDOM_TREE_DEFAULTS, TreeModel, _check_params, default_k, train_random_tree

FOREST_DEFAULTS = {"n_trees": 100, "k": None, "min_leaf": 2, "max_depth": None, "bootstrap": True}


@dataclass(frozen=True, eq=False)
class ForestModel:
    features: FeatureSet
    trees: tuple[TreeModel, ...]
    seed: int
    params: Mapping[str, Any] = field(default_factory=dict)
    algorithm: str = "random_forest"

    def __post_init__(self):
        if not self.trees:
            raise ValueError("a forest needs at least one tree")
        if any(t.features != self.features for t in self.trees):
            raise ValueError("all trees must share the forest's feature set")
        object.__setattr__(self, "trees", tuple(self.trees))

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        """Mean over trees of the Good proportion in the reached leaf."""
        X = np.ascontiguousarray(np.atleast_2d(X), dtype=float)
        total = np.zeros(len(X))
        for tree in self.trees:
            total += tree.predict_proba(X)
        return total / len(self.trees)


def train_random_forest(
    dataset, params: Mapping[str, Any] | None = None, seed: int = 0, threads: int = 1
) -> ForestModel:
    """Bagged random trees.

    Tree ``i`` draws its bootstrap sample and its split candidates from a
    stream spawned as child ``i`` of ``seed``, so the forest does not depend
    on how trees are scheduled across ``threads``.
    """
    if len(dataset) == 0:
        raise TrainingError("cannot train on an empty dataset")
    p = _check_params(params, FOREST_DEFAULTS)
    if p["n_trees"] < 1:
        raise TrainingError("n_trees must be >= 1")
    n_features = len(dataset.features)
    p["k"] = min(default_k(n_features) if p["k"] is None else int(p["k"]), n_features)
    tree_params = {name: p[name] for name in RANDOM_TREE_DEFAULTS}
    streams = np.random.SeedSequence(seed).spawn(p["n_trees"])
    n = len(dataset)

    def fit_one(stream: np.random.SeedSequence) -> TreeModel:
        rng = np.random.default_rng(stream)
        rows = rng.integers(0, n, n) if p["bootstrap"] else np.arange(n)
        return train_random_tree(dataset, tree_params, rng, rows=rows)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            trees = list(pool.map(fit_one, streams))
    else:
        trees = [fit_one(s) for s in streams]
    return ForestModel(dataset.features, tuple(trees), seed, p)
