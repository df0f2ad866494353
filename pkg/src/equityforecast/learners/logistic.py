from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np
from scipy.special import expit, log_expit

from ..dataset import SENTINEL, FeatureSet
from ..errors import TrainingError
from .tree import _check_params

LOGISTIC_DEFAULTS = {"ridge": 1e-8, "tol": 1e-6, "max_iter": 500}


@dataclass(frozen=True, eq=False)
class LogisticModel:
    """Logistic regression on standardized, median-imputed features.

    ``weights`` act on ``(x - center) / scale``; missing inputs are replaced
    by ``impute`` before standardizing.
    """

    features: FeatureSet
    weights: np.ndarray
    intercept: float
    center: np.ndarray
    scale: np.ndarray
    impute: np.ndarray
    params: Mapping[str, Any] = field(default_factory=dict)
    n_iter: int = 0
    grad_norm: float = 0.0
    algorithm: str = "logistic"

    def __post_init__(self):
        for name in ("weights", "center", "scale", "impute"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if (self.scale <= 0).any():
            raise ValueError("scale must be positive")
        if not np.isfinite(self.weights).all():
            raise ValueError("weights must be finite")

    @property
    def converged(self) -> bool:
        return self.grad_norm < self.params.get("tol", LOGISTIC_DEFAULTS["tol"])

    def transform(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        X = np.where(X == SENTINEL, self.impute, X)
        return (X - self.center) / self.scale

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return expit(self.transform(X) @ self.weights + self.intercept)


def objective(theta: np.ndarray, Z: np.ndarray, y: np.ndarray, ridge: float) -> float:
    """Penalized log-likelihood; ``theta[0]`` is the unpenalized intercept."""
    eta = theta[0] + Z @ theta[1:]
    return float(np.sum(y * log_expit(eta) + (1 - y) * log_expit(-eta)) - ridge * theta[1:] @ theta[1:])


def _fit(Z: np.ndarray, y: np.ndarray, ridge: float, tol: float, max_iter: int):
    """Damped Newton ascent on :func:`objective`. Returns (theta, iterations, grad max-norm)."""
    n, d = Z.shape
    A = np.hstack([np.ones((n, 1)), Z])
    penalty = np.full(d + 1, 2.0 * ridge)
    penalty[0] = 0.0
    theta = np.zeros(d + 1)
    value = objective(theta, Z, y, ridge)
    for it in range(max_iter + 1):
        p = expit(A @ theta)
        grad = A.T @ (y - p) - penalty * theta
        gnorm = float(np.max(np.abs(grad)))
        if gnorm < tol or it == max_iter:
            return theta, it, gnorm
        w = p * (1 - p)
        H = (A * w[:, None]).T @ A + np.diag(penalty)
        try:
            step = np.linalg.solve(H, grad)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(H, grad, rcond=None)[0]
        t = 1.0
        while True:
            candidate = theta + t * step
            new_value = objective(candidate, Z, y, ridge)
            if new_value >= value or t < 1e-10:
                break
            t *= 0.5
        if new_value < value:
            return theta, it, gnorm
        theta, value = candidate, new_value
    return theta, max_iter, gnorm


def train_logistic(dataset, params: Mapping[str, Any] | None = None) -> LogisticModel:
    p = _check_params(params, LOGISTIC_DEFAULTS)
    if p["ridge"] < 0 or p["tol"] <= 0 or p["max_iter"] < 0:
        raise TrainingError("need ridge >= 0, tol > 0 and max_iter >= 0")
    y = dataset.y.astype(float)
    if y.sum() == 0 or y.sum() == len(y):
        raise TrainingError("logistic regression needs both classes in the training data")
    X = dataset.X
    n_features = X.shape[1]
    impute = np.zeros(n_features)
    center = np.zeros(n_features)
    scale = np.ones(n_features)
    for j in range(n_features):
        col = X[:, j][X[:, j] != SENTINEL]
        if col.size:
            impute[j] = np.median(col)
            center[j] = col.mean()
            sd = col.std()
            scale[j] = sd if sd > 0 else 1.0
    Z = (np.where(X == SENTINEL, impute, X) - center) / scale
    theta, n_iter, gnorm = _fit(Z, y, p["ridge"], p["tol"], p["max_iter"])
    return LogisticModel(dataset.features, theta[1:], float(theta[0]), center, scale, impute,
                         params=p, n_iter=n_iter, grad_norm=gnorm)
