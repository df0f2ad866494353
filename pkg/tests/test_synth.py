import math

import numpy as np
import pytest
from scipy.special import ndtr

from equityforecast.dataset import FeatureSet
from equityforecast.errors import ConfigError
from equityforecast.labeling import build_dataset
from equityforecast.synth import (
    DEFAULT_BAYES_RATE, SIGNAL_FEATURES, SynthConfig, bayes_rate, generate,
)

PE_ONLY = dict(signal_weights={"PE_RATIO": 1.0}, interaction_terms=(), noise_std=0.0)


def test_noiseless_single_feature_label_is_a_threshold_on_it():
    config = SynthConfig(n_stocks=150, history_quarters=2, **PE_ONLY)
    data = build_dataset(generate(config, seed=3), FeatureSet(["PE_RATIO"]))
    pe = data.X[:, 0]
    good, bad = pe[data.y == 1], pe[data.y == 0]
    assert len(good) and len(bad)
    # lognormal(2.9, 0.5) with z = 0 at the boundary
    assert bad.max() < math.exp(2.9) <= good.min() * (1 + 1e-9)


def test_row_count_follows_labeling_arithmetic():
    config = SynthConfig(n_stocks=1739, history_quarters=2)
    snaps = generate(config, seed=0)
    assert len(snaps) == 1739 * 6
    data = build_dataset(snaps, FeatureSet.all())
    assert len(data) == 2 * 1739
    assert data.dropped == 4 * 1739


def test_generation_is_deterministic():
    config = SynthConfig(n_stocks=20, missing_rate=0.2)
    assert generate(config, 5) == generate(config, 5)
    assert generate(config, 5) != generate(config, 6)


def test_missing_rate_masks_indicators_not_prices():
    snaps = generate(SynthConfig(n_stocks=200, missing_rate=0.3), seed=1)
    present = np.mean([len(s.indicators) / 28 for s in snaps])
    assert present == pytest.approx(0.7, abs=0.02)
    assert all(s.history_price > 0 for s in snaps)


def test_good_fraction_matches_analytic_crossing_probability():
    # noiseless, Good iff z_PE >= -bias, so P(Good) = Phi(bias)
    config = SynthConfig(n_stocks=5000, history_quarters=1, bias=0.3, **PE_ONLY)
    data = build_dataset(generate(config, seed=9), FeatureSet(["PE_RATIO"]))
    p = float(ndtr(0.3))
    sigma = math.sqrt(p * (1 - p) / len(data))
    assert abs(data.y.mean() - p) <= 3 * sigma


def test_bayes_rate_limits():
    assert bayes_rate(SynthConfig(noise_std=0.0), 2000) == (1.0, 0.0)
    assert bayes_rate(SynthConfig(noise_std=1e6), 20000).rate == pytest.approx(0.5, abs=1e-3)


def test_bayes_rate_non_increasing_in_noise():
    rates = [bayes_rate(SynthConfig(noise_std=s), 50_000, seed=4).rate for s in (0.3, 0.65, 1.0)]
    assert rates[0] >= rates[1] >= rates[2]


def test_default_bayes_rate_constant():
    est = bayes_rate(SynthConfig(), 200_000, seed=7)
    assert abs(est.rate - DEFAULT_BAYES_RATE) <= 4 * est.stderr + 1e-4
    assert 0.83 <= DEFAULT_BAYES_RATE <= 0.87


def test_signal_set_is_the_selected_ten_plus_profit_margin():
    assert len(SIGNAL_FEATURES) == 11
    assert set(SynthConfig().signal_weights) == set(SIGNAL_FEATURES)


@pytest.mark.parametrize("bad", [
    dict(n_stocks=0), dict(missing_rate=1.0), dict(signal_weights={"PE_RATIO": 0.0}),
    dict(signal_weights={"nope": 1.0}), dict(noise_std=-1.0),
])
def test_invalid_config_rejected(bad):
    with pytest.raises(ConfigError):
        generate(SynthConfig(**bad), seed=0)


def test_bayes_rate_needs_enough_samples():
    with pytest.raises(ConfigError):
        bayes_rate(SynthConfig(), 999)
