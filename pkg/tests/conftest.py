import sys

import numpy as np
import pytest

from equityforecast.dataset import FeatureSet, registry
from equityforecast.labeling import LabeledDataset


def make_dataset(X, y, features=None):
    """LabeledDataset over the first registry ids, with dummy provenance."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if features is None:
        features = FeatureSet(registry().ids[: X.shape[1]])
    n = len(X)
    return LabeledDataset(features, X, np.asarray(y), tuple(f"T{i}" for i in range(n)), np.zeros(n, dtype=int))


@pytest.fixture
def planted():
    """200 rows, 4 features; only the first two carry signal."""
    rng = np.random.default_rng(11)
    X = rng.normal(size=(200, 4))
    y = (X[:, 0] + 0.5 * X[:, 1] + 0.3 * rng.normal(size=200) > 0).astype(int)
    return make_dataset(X, y)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
