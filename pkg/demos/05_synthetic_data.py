"""
Synthetic fundamentals with a planted signal
============================================

The generator draws every indicator from a fixed marginal and makes the
one-year log return depend on a weighted sum of standardized signal
indicators, a few pairwise interactions and Gaussian noise. ``bayes_rate``
gives the accuracy of the ideal classifier for a configuration.
"""

import numpy as np

from equityforecast.dataset import FeatureSet
from equityforecast.labeling import build_dataset
from equityforecast.synth import DEFAULT_BAYES_RATE, SynthConfig, bayes_rate, generate

config = SynthConfig(n_stocks=200, history_quarters=2)
snapshots = generate(config, seed=0)
data = build_dataset(snapshots, FeatureSet.all())
print(len(snapshots), "snapshots ->", len(data), "labeled rows,", data.n_good, "Good")

print("reference constant:", DEFAULT_BAYES_RATE)
for noise in (0.0, 0.3, 0.65, 1.5):
    est = bayes_rate(SynthConfig(noise_std=noise), n_samples=50_000, seed=1)
    print(f"noise {noise:<5} Bayes rate {est.rate:.4f} +- {est.stderr:.4f}")

# missing values are masked per indicator
holey = generate(SynthConfig(n_stocks=100, missing_rate=0.2), seed=0)
print("indicators present:", np.mean([len(s.indicators) for s in holey]), "of 28")
