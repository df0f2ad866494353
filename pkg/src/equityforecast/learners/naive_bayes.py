from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from ..dataset import SENTINEL, FeatureSet
from ..errors import TrainingError

VARIANCE_FLOOR = 1e-9


@dataclass(frozen=True, eq=False)
class NaiveBayesModel:
    """Gaussian naive Bayes over two classes.

    Row 0 of ``mean``/``var`` is the Bad class, row 1 the Good class. A
    feature with no observed value in some class is marked unusable and is
    skipped at prediction time, as are missing inputs.
    """

    features: FeatureSet
    priors: np.ndarray  # (P(Bad), P(Good))
    mean: np.ndarray
    var: np.ndarray
    usable: np.ndarray
    algorithm: str = "naive_bayes"

    def __post_init__(self):
        for name in ("priors", "mean", "var", "usable"):
            arr = np.array(getattr(self, name), dtype=bool if name == "usable" else float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def params(self) -> dict:
        return {}

    def log_likelihood_ratio(self, X: np.ndarray) -> np.ndarray:
        """log P(x | Good) - log P(x | Bad), summed over observed usable features."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        observed = (X != SENTINEL) & self.usable
        def loglik(c):
            return -0.5 * (np.log(2 * np.pi * self.var[c]) + (X - self.mean[c]) ** 2 / self.var[c])
        return np.where(observed, loglik(1) - loglik(0), 0.0).sum(axis=1)

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        log_odds = np.log(self.priors[1]) - np.log(self.priors[0]) + self.log_likelihood_ratio(X)
        return expit(log_odds)


def train_naive_bayes(dataset, params=None) -> NaiveBayesModel:
    if params:
        raise TrainingError(f"naive_bayes takes no hyperparameters, got {', '.join(params)}")
    y = dataset.y
    n_good = int(y.sum())
    if n_good == 0 or n_good == len(y):
        raise TrainingError("naive Bayes needs both classes in the training data")
    n_features = len(dataset.features)
    mean = np.zeros((2, n_features))
    var = np.ones((2, n_features))
    usable = np.ones(n_features, dtype=bool)
    for c in (0, 1):
        Xc = dataset.X[y == c]
        for j in range(n_features):
            col = Xc[:, j]
            col = col[col != SENTINEL]
            if col.size == 0:
                usable[j] = False
                continue
            mean[c, j] = col.mean()
            var[c, j] = max(col.var(), VARIANCE_FLOOR)
    priors = np.array([len(y) - n_good, n_good]) / len(y)
    return NaiveBayesModel(dataset.features, priors, mean, var, usable)
