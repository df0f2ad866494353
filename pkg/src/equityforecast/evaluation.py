"""Stratified k-fold cross-validation, weighted P/R/F and the paired t-test."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import betainc

from .errors import EvaluationError, StratificationError
from .learners import LearnerSpec, labels_from_scores, predict_proba, train


@dataclass(frozen=True, eq=False)
class FoldAssignment:
    k: int
    folds: np.ndarray  # fold index per example

    def __post_init__(self):
        folds = np.asarray(self.folds, dtype=np.int64)
        folds.setflags(write=False)
        object.__setattr__(self, "folds", folds)

    def test_rows(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.folds == fold)

    def train_rows(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.folds != fold)

    def __eq__(self, other) -> bool:
        return isinstance(other, FoldAssignment) and self.k == other.k and np.array_equal(self.folds, other.folds)


def stratified_folds(dataset, k: int = 10, seed: int = 0) -> FoldAssignment:
    """Shuffle, then deal each class round-robin over the folds.

    Good examples are dealt first; the Bad class continues from the fold
    where the Good class stopped, which keeps fold sizes within one.
    """
    if k < 2:
        raise StratificationError("k must be >= 2")
    y = np.asarray(dataset.y)
    order = np.random.default_rng(seed).permutation(len(y))
    folds = np.empty(len(y), dtype=np.int64)
    offset = 0
    for cls in (1, 0):
        members = order[y[order] == cls]
        if len(members) < k:
            raise StratificationError(
                f"class {'Good' if cls else 'Bad'} has {len(members)} examples, fewer than k={k}"
            )
        folds[members] = (offset + np.arange(len(members))) % k
        offset = (offset + len(members)) % k
    return FoldAssignment(k, folds)


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts with Good as the positive class."""

    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    @classmethod
    def from_labels(cls, truth, predicted) -> "ConfusionMatrix":
        truth = np.asarray(truth).astype(bool)
        predicted = np.asarray(predicted).astype(bool)
        return cls(
            int((truth & predicted).sum()), int((~truth & predicted).sum()),
            int((truth & ~predicted).sum()), int((~truth & ~predicted).sum()),
        )

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn, self.tn + other.tn)

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / self.total


def _prf(hit: int, predicted: int, actual: int) -> tuple[float, float, float]:
    p = hit / predicted if predicted else 0.0
    r = hit / actual if actual else 0.0
    f = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return p, r, f


def weighted_prf(confusion: ConfusionMatrix) -> tuple[float, float, float]:
    """Per-class precision, recall and F averaged with true-class support as weight.

    A class that is never predicted has precision 0.
    """
    c = confusion
    if c.total <= 0:
        raise EvaluationError("weighted_prf of an empty confusion matrix")
    good = _prf(c.tp, c.tp + c.fp, c.tp + c.fn)
    bad = _prf(c.tn, c.tn + c.fn, c.tn + c.fp)
    w_good = (c.tp + c.fn) / c.total
    w_bad = (c.tn + c.fp) / c.total
    return tuple(w_good * g + w_bad * b for g, b in zip(good, bad))


@dataclass(frozen=True)
class EvalReport:
    algorithm: str
    hyperparameters: dict
    learner_seed: int | None
    k: int
    seed: int
    fold_confusions: tuple[ConfusionMatrix, ...]
    fold_f: tuple[float, ...]
    precision: float
    recall: float
    f_score: float
    accuracy: float

    @property
    def pooled(self) -> ConfusionMatrix:
        total = ConfusionMatrix()
        for c in self.fold_confusions:
            total = total + c
        return total

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "hyperparameters": self.hyperparameters,
            "learner_seed": self.learner_seed,
            "k": self.k,
            "seed": self.seed,
            "folds": [
                {"tp": c.tp, "fp": c.fp, "fn": c.fn, "tn": c.tn, "f_score": f}
                for c, f in zip(self.fold_confusions, self.fold_f)
            ],
            "precision": self.precision,
            "recall": self.recall,
            "f_score": self.f_score,
            "accuracy": self.accuracy,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


def format_table(reports: Sequence[EvalReport]) -> str:
    """Aligned Algorithm / Precision / Recall / F-score table."""
    width = max([len("Algorithm")] + [len(r.algorithm) for r in reports])
    lines = [f"{'Algorithm':<{width}}  Precision  Recall  F-score"]
    for r in reports:
        lines.append(f"{r.algorithm:<{width}}  {r.precision:>9.3f}  {r.recall:>6.3f}  {r.f_score:>7.3f}")
    return "\n".join(lines) + "\n"


def cross_validate(
    spec: LearnerSpec,
    dataset,
    k: int = 10,
    seed: int = 0,
    folds: FoldAssignment | None = None,
    threads: int = 1,
) -> EvalReport:
    """Train on k-1 folds, score the held-out fold, pool the confusions.

    Pass ``folds`` to reuse an assignment (``k`` and ``seed`` are then only
    recorded). ``threads`` is handed to the learner and never changes the
    result.
    """
    if folds is None:
        folds = stratified_folds(dataset, k, seed)
    elif len(folds.folds) != len(dataset):
        raise EvaluationError("fold assignment does not match the dataset size")
    confusions, fold_f = [], []
    for fold in range(folds.k):
        train_rows, test_rows = folds.train_rows(fold), folds.test_rows(fold)
        try:
            model = train(spec, dataset.subset(train_rows), threads=threads)
        except Exception as exc:
            raise EvaluationError(f"fold {fold}: {exc}") from exc
        predicted = labels_from_scores(predict_proba(model, dataset.X[test_rows]))
        cm = ConfusionMatrix.from_labels(dataset.y[test_rows], predicted)
        confusions.append(cm)
        fold_f.append(weighted_prf(cm)[2])
    pooled = ConfusionMatrix()
    for cm in confusions:
        pooled = pooled + cm
    p, r, f = weighted_prf(pooled)
    return EvalReport(
        spec.algorithm, dict(spec.hyperparameters), spec.seed, folds.k, seed,
        tuple(confusions), tuple(fold_f), p, r, f, pooled.accuracy,
    )


@dataclass(frozen=True)
class TestResult:
    t: float
    p: float
    significant: bool
    alpha: float
    df: int

    __test__ = False  # not a pytest class


def t_two_sided_p(t: float, df: int) -> float:
    """P(|T| >= |t|) for Student's t with ``df`` degrees of freedom."""
    if math.isinf(t):
        return 0.0
    return float(betainc(df / 2.0, 0.5, df / (df + t * t)))


def paired_t_test(
    a: Sequence[float], b: Sequence[float], alpha: float = 0.05, corrected: bool = False,
    test_train_ratio: float | None = None,
) -> TestResult:
    """Two-sided paired t-test on ``a - b``.

    ``corrected=True`` applies the resampled-CV variance correction, which
    inflates the variance of the mean by ``1/n + test_train_ratio``
    (default ``1 / (n - 1)``, i.e. n-fold CV) instead of ``1/n``.
    Zero-variance differences (up to a relative 1e-12 rounding allowance)
    give p = 0 when their mean is nonzero and t = 0, p = 1 when it is zero.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise EvaluationError(f"paired samples must be equal-length vectors, got {a.shape} and {b.shape}")
    n = len(a)
    if n < 2:
        raise EvaluationError("paired t-test needs at least two pairs")
    d = a - b
    mean = d.mean()
    var = d.var(ddof=1)
    df = n - 1
    # differences equal up to rounding (e.g. a = b + 0.1) count as zero variance
    if var <= (1e-12 * np.max(np.abs(d))) ** 2:
        if mean == 0.0:
            return TestResult(0.0, 1.0, False, alpha, df)
        t = math.copysign(math.inf, mean)
        return TestResult(t, 0.0, True, alpha, df)
    factor = 1.0 / n
    if corrected:
        factor += 1.0 / (n - 1) if test_train_ratio is None else test_train_ratio
    t = float(mean / math.sqrt(var * factor))
    p = t_two_sided_p(t, df)
    return TestResult(t, p, p < alpha, alpha, df)
