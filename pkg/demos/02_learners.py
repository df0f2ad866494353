"""
Trees, forests, naive Bayes and logistic regression
===================================================

All learners take a LabeledDataset and return an immutable model whose
``predict_proba`` gives the probability of Good.
"""

import numpy as np

from equityforecast.dataset import SENTINEL, FeatureSet
from equityforecast.labeling import LabeledDataset
from equityforecast.learners import LearnerSpec, gain_ratio, predict, predict_proba, train

# the split criterion on its own
print(gain_ratio([1, 1, 3, 3], [1, 1, 0, 0], threshold=2))   # 1.0
print(gain_ratio([1, 1, 3, 3], [1, 0, 1, 0], threshold=2))   # 0.0

# a toy problem with an interaction that a linear model cannot see
rng = np.random.default_rng(0)
n = 600
X = rng.normal(size=(n, 4))
y = ((X[:, 0] * X[:, 1] > 0) ^ (rng.random(n) < 0.1)).astype(np.int8)
X[rng.random(X.shape) < 0.05] = SENTINEL   # a few missing values
features = FeatureSet(["PE_RATIO", "PX_TO_BOOK_RATIO", "CUR_RATIO", "QUICK_RATIO"])
data = LabeledDataset(features, X, y, tuple(f"T{i}" for i in range(n)), np.zeros(n, dtype=int))
train_rows, test_rows = np.arange(400), np.arange(400, n)

for spec in [
    LearnerSpec("c45_tree"),
    LearnerSpec("random_tree", seed=1),
    LearnerSpec("random_forest", {"n_trees": 50}, seed=1),
    LearnerSpec("naive_bayes"),
    LearnerSpec("logistic"),
]:
    model = train(spec, data.subset(train_rows))
    acc = ((predict_proba(model, X[test_rows]) >= 0.5) == y[test_rows]).mean()
    print(f"{spec.algorithm:<14} held-out accuracy {acc:.3f}")

tree = train(LearnerSpec("c45_tree"), data.subset(train_rows))
print("pruned tree:", tree.n_nodes, "nodes, depth", tree.depth)
print(predict(tree, X[450]))
