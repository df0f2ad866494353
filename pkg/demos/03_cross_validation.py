"""
Cross-validation and significance
=================================

Stratified 10-fold CV with support-weighted precision, recall and F, then
a paired t-test on the per-fold F-scores of two learners that shared the
same folds.
"""

from equityforecast.dataset import FeatureSet
from equityforecast.evaluation import (
    ConfusionMatrix, cross_validate, format_table, paired_t_test, stratified_folds, weighted_prf,
)
from equityforecast.labeling import balance, build_dataset
from equityforecast.learners import LearnerSpec
from equityforecast.synth import SynthConfig, generate

# always predicting Good on a balanced set
print(weighted_prf(ConfusionMatrix(tp=5, fp=5, fn=0, tn=0)))   # (0.25, 0.5, 0.333...)

snapshots = generate(SynthConfig(n_stocks=400), seed=3)
data = balance(build_dataset(snapshots, FeatureSet.all()), seed=3)
print(len(data), "balanced rows")

folds = stratified_folds(data, k=10, seed=3)
forest = cross_validate(LearnerSpec("random_forest", {"n_trees": 50}, seed=3), data, folds=folds)
logit = cross_validate(LearnerSpec("logistic"), data, folds=folds)
print(format_table([forest, logit]))

res = paired_t_test(forest.fold_f, logit.fold_f)
print(f"t = {res.t:.3f}, p = {res.p:.4f}, significant: {res.significant}")
