"""
Backward feature elimination
============================

Each pass drops the feature whose removal scores best, as long as the
cross-validated F does not go down. The trace records every candidate.
"""

from equityforecast.dataset import FeatureSet
from equityforecast.labeling import balance, build_dataset
from equityforecast.learners import LearnerSpec
from equityforecast.selection import backward_eliminate
from equityforecast.synth import SIGNAL_FEATURES, SynthConfig, generate

snapshots = generate(SynthConfig(n_stocks=500), seed=7)
# planted signal features plus a handful of pure-noise indicators
start = FeatureSet(list(SIGNAL_FEATURES[:5]) + ["eps_growth", "sales_growth", "unlisted_1", "unlisted_2"])
data = balance(build_dataset(snapshots, start), seed=7)

result = backward_eliminate(data, LearnerSpec("logistic"), k=5, seed=7)
print(result.format_trace())
print("kept:", ", ".join(result.selected))
print(f"F {result.initial_score:.4f} -> {result.final_score:.4f}")
assert result.replay() == result.selected
