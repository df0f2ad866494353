"""C4.5-style decision trees and random trees."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np
from scipy.special import betaincinv

from ..dataset import FeatureSet
from ..errors import TrainingError
from . import _core


def entropy(labels: Sequence[int]) -> float:
    """Shannon entropy in bits of a 0/1 label sequence."""
    labels = np.asarray(labels)
    if labels.size == 0:
        return 0.0
    g = int(labels.sum())
    return float(_core.entropy2(g, labels.size - g))


def information_gain(values: Sequence[float], labels: Sequence[int], threshold: float) -> float:
    values = np.asarray(values, dtype=float)
    labels = np.asarray(labels)
    mask = values <= threshold
    n = labels.size
    cond = (mask.sum() * entropy(labels[mask]) + (~mask).sum() * entropy(labels[~mask])) / n
    return entropy(labels) - cond


def split_information(values: Sequence[float], threshold: float) -> float:
    values = np.asarray(values, dtype=float)
    n_left = int((values <= threshold).sum())
    return float(_core.entropy2(n_left, values.size - n_left))


def gain_ratio(values: Sequence[float], labels: Sequence[int], threshold: float) -> float:
    """Information gain of the split ``value <= threshold`` over its split information.

    Labels are 1 for Good and 0 for Bad. Returns 0 when the split puts every
    row on one side.
    """
    if len(values) == 0:
        raise ValueError("gain_ratio needs at least one row")
    si = split_information(values, threshold)
    if si == 0.0:
        return 0.0
    return information_gain(values, labels, threshold) / si


@dataclass(frozen=True, eq=False)
class TreeModel:
    features: FeatureSet
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    missing_left: np.ndarray
    good: np.ndarray
    bad: np.ndarray
    params: Mapping[str, Any] = field(default_factory=dict)
    algorithm: str = "c45_tree"

    def __post_init__(self):
        dtypes = dict(feature=np.int32, threshold=np.float64, left=np.int32, right=np.int32,
                      missing_left=np.bool_, good=np.int64, bad=np.int64)
        for name, dtype in dtypes.items():
            arr = np.array(getattr(self, name), dtype=dtype)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if (self.feature >= len(self.features)).any():
            raise ValueError("split feature index out of range")
        if (self.threshold[self.feature >= 0] == _core.SENTINEL).any():
            raise ValueError("split threshold equals the missing-value sentinel")

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    @property
    def n_leaves(self) -> int:
        return int((self.feature < 0).sum())

    @property
    def depth(self) -> int:
        depth = np.zeros(self.n_nodes, dtype=int)
        for i in range(self.n_nodes):
            if self.feature[i] >= 0:
                depth[self.left[i]] = depth[self.right[i]] = depth[i] + 1
        return int(depth.max())

    def leaves(self, X: np.ndarray) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=float)
        return _core.leaf_index(self.feature, self.threshold, self.left, self.right, self.missing_left, X)

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        """Good-class proportion of the leaf each row lands in."""
        leaf = self.leaves(np.atleast_2d(X))
        g = self.good[leaf]
        return g / (g + self.bad[leaf])


TREE_DEFAULTS = {"min_leaf": 2, "prune": True, "confidence": 0.25, "max_depth": None}
RANDOM_TREE_DEFAULTS = {"min_leaf": 2, "k": None, "max_depth": None}


def default_k(n_features: int) -> int:
    return int(math.floor(math.log2(n_features))) + 1


def _check_params(params: Mapping[str, Any] | None, defaults: Mapping[str, Any]) -> dict[str, Any]:
    params = dict(params or {})
    unknown = sorted(set(params) - set(defaults))
    if unknown:
        raise TrainingError(f"unknown hyperparameter(s): {', '.join(unknown)}")
    return {**defaults, **params}


def grow(X, y, rows, k, min_leaf, max_depth, randomize, rng):
    if min_leaf < 1:
        raise TrainingError("min_leaf must be >= 1")
    return _core.build_tree(
        np.ascontiguousarray(X, dtype=np.float64), np.ascontiguousarray(y, dtype=np.int64),
        np.ascontiguousarray(rows, dtype=np.int64), int(k), int(min_leaf),
        -1 if max_depth is None else int(max_depth), bool(randomize), rng,
    )


def pessimistic_errors(n: int, errors: int, confidence: float) -> float:
    """Upper confidence bound on the number of errors at a leaf.

    ``n`` times the exact binomial upper limit of the error rate at
    one-sided level ``confidence``.
    """
    if errors >= n:
        return float(n)
    return n * float(betaincinv(errors + 1, n - errors, 1.0 - confidence))


def prune(arrays: tuple[np.ndarray, ...], confidence: float) -> tuple[np.ndarray, ...]:
    """Bottom-up subtree replacement by pessimistic error estimate.

    A subtree becomes a leaf when the leaf's estimated errors do not exceed
    the subtree's summed leaf estimates plus 0.1.
    """
    feature, threshold, left, right, missing_left, good, bad = (a.copy() for a in arrays)

    estimate = np.zeros(len(feature))
    # children always carry larger ids than their parent
    for node in range(len(feature) - 1, -1, -1):
        n = int(good[node] + bad[node])
        as_leaf = pessimistic_errors(n, int(min(good[node], bad[node])), confidence)
        if feature[node] < 0:
            estimate[node] = as_leaf
            continue
        subtree = estimate[left[node]] + estimate[right[node]]
        if as_leaf <= subtree + 0.1:
            feature[node] = -1
            estimate[node] = as_leaf
        else:
            estimate[node] = subtree
    return _compact(feature, threshold, left, right, missing_left, good, bad)


def _compact(feature, threshold, left, right, missing_left, good, bad):
    """Drop unreachable nodes, renumbering in depth-first (left-first) order."""
    order = []
    stack = [0]
    while stack:
        node = stack.pop()
        order.append(node)
        if feature[node] >= 0:
            stack.append(right[node])
            stack.append(left[node])
    new_id = {old: i for i, old in enumerate(order)}
    idx = np.array(order)
    f = feature[idx]
    out_left = np.array([new_id[left[o]] if feature[o] >= 0 else -1 for o in order], dtype=np.int32)
    out_right = np.array([new_id[right[o]] if feature[o] >= 0 else -1 for o in order], dtype=np.int32)
    thr = np.where(f >= 0, threshold[idx], 0.0)
    miss = np.where(f >= 0, missing_left[idx], False)
    return f, thr, out_left, out_right, miss, good[idx], bad[idx]


def _check_dataset(dataset) -> None:
    if len(dataset) == 0:
        raise TrainingError("cannot train on an empty dataset")


def train_c45(dataset, params: Mapping[str, Any] | None = None) -> TreeModel:
    """Greedy gain-ratio tree over all features, optionally pruned."""
    _check_dataset(dataset)
    p = _check_params(params, TREE_DEFAULTS)
    rows = np.arange(len(dataset))
    arrays = grow(dataset.X, dataset.y, rows, len(dataset.features), p["min_leaf"], p["max_depth"],
                  False, np.random.default_rng(0))
    if p["prune"]:
        if not 0 < p["confidence"] < 1:
            raise TrainingError("confidence must lie in (0, 1)")
        arrays = prune(arrays, p["confidence"])
    else:
        arrays = _compact(*arrays)
    return TreeModel(dataset.features, *arrays, params=p, algorithm="c45_tree")


def train_random_tree(
    dataset, params: Mapping[str, Any] | None = None, seed: int | np.random.Generator = 0,
    rows: np.ndarray | None = None,
) -> TreeModel:
    """Unpruned tree that considers ``k`` random features at each node.

    ``rows`` selects (possibly repeated) training rows, as used for bagging.
    """
    _check_dataset(dataset)
    p = _check_params(params, RANDOM_TREE_DEFAULTS)
    n_features = len(dataset.features)
    k = default_k(n_features) if p["k"] is None else int(p["k"])
    if not 1 <= k:
        raise TrainingError("k must be >= 1")
    k = min(k, n_features)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if rows is None:
        rows = np.arange(len(dataset))
    arrays = _compact(*grow(dataset.X, dataset.y, rows, k, p["min_leaf"], p["max_depth"], True, rng))
    return TreeModel(dataset.features, *arrays, params={**p, "k": k}, algorithm="random_tree")
