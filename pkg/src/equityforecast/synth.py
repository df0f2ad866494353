"""Synthetic quarterly fundamentals with a planted link to one-year returns.

Every company-quarter draws one standard-normal latent per indicator; the
published value is a fixed transform of it (log-normal for money amounts
and valuation ratios, normal for growth rates and margins, see
``PROFILE``). The log return over the next four quarters is::

    log(1 + threshold) + bias + sum_i w_i z_i + sum_ij w_ij z_i z_j + noise_std * eps

so a stock is Good exactly when the planted score plus noise is >= -bias.
Prices follow four interleaved chains, ``P[t + 4] = P[t] * exp(r_t)``,
which keeps the price at ``t + 4`` consistent with the label of ``t``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple, Sequence

import numpy as np
from scipy.special import ndtr

from .dataset import SELECTED_FEATURES, StockSnapshot, registry
from .errors import ConfigError

# indicator -> (kind, loc, scale); lognormal values are exp(loc + scale * z)
PROFILE: dict[str, tuple[str, float, float]] = {
    "book_value": ("lognormal", 7.6, 1.5),
    "market_cap": ("lognormal", 8.0, 1.5),
    "net_price_change_1m": ("normal", 0.3, 3.0),
    "net_price_pct_change_1m": ("normal", 0.5, 6.0),
    "DIVIDEND_YIELD": ("lognormal", 0.7, 0.6),
    "BEST_EPS": ("normal", 2.5, 2.0),
    "eps_growth": ("normal", 5.0, 25.0),
    "sales_revenue_turnover": ("lognormal", 7.5, 1.4),
    "net_revenue": ("lognormal", 6.0, 1.6),
    "net_revenue_growth": ("normal", 4.0, 20.0),
    "sales_growth": ("normal", 4.0, 12.0),
    "PE_RATIO": ("lognormal", 2.9, 0.5),
    "pe_ratio_5y_avg": ("lognormal", 2.9, 0.4),
    "PX_TO_BOOK_RATIO": ("lognormal", 0.8, 0.7),
    "price_to_sales_ratio": ("lognormal", 0.5, 0.8),
    "BEST_DPS": ("lognormal", 0.0, 0.9),
    "CUR_RATIO": ("lognormal", 0.4, 0.45),
    "QUICK_RATIO": ("lognormal", 0.1, 0.5),
    "TOT_DEBT_TO_TOT_EQY": ("lognormal", 4.0, 0.9),
    "analyst_ratio": ("normal", 3.8, 0.6),
    "revenue_growth_5y_cagr": ("normal", 5.0, 8.0),
    "profit_margin": ("normal", 8.0, 10.0),
    "operating_margin": ("normal", 12.0, 12.0),
    "unlisted_1": ("normal", 0.0, 1.0),
    "unlisted_2": ("normal", 0.0, 1.0),
    "unlisted_3": ("normal", 0.0, 1.0),
    "unlisted_4": ("normal", 0.0, 1.0),
    "asset_turnover": ("lognormal", -0.4, 0.5),
}
PRICE_PROFILE = ("lognormal", 3.5, 1.0)

#: Eleven planted indicators: the ten published registry picks plus profit margin.
SIGNAL_FEATURES = tuple(f for f in SELECTED_FEATURES if f != "history_price") + ("profit_margin",)

DEFAULT_WEIGHTS = {
    "PE_RATIO": -0.50,
    "PX_TO_BOOK_RATIO": -0.40,
    "BEST_EPS": 0.35,
    "DIVIDEND_YIELD": 0.30,
    "CUR_RATIO": 0.30,
    "QUICK_RATIO": 0.25,
    "TOT_DEBT_TO_TOT_EQY": -0.25,
    "book_value": 0.20,
    "market_cap": 0.20,
    "BEST_DPS": 0.20,
    "profit_margin": 0.20,
}
DEFAULT_INTERACTIONS = (
    ("PE_RATIO", "PX_TO_BOOK_RATIO", 0.70),
    ("CUR_RATIO", "TOT_DEBT_TO_TOT_EQY", 0.60),
    ("BEST_EPS", "DIVIDEND_YIELD", 0.50),
)

# bayes_rate(SynthConfig(), 1_000_000, seed=2024) -> 0.84878 (stderr 1.5e-4)
DEFAULT_BAYES_RATE = 0.8488


@dataclass(frozen=True)
class SynthConfig:
    n_stocks: int = 1739
    history_quarters: int = 4
    start: tuple[int, int] = (2014, 1)
    signal_weights: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_WEIGHTS))
    interaction_terms: Sequence[tuple[str, str, float]] = DEFAULT_INTERACTIONS
    noise_std: float = 0.65
    missing_rate: float = 0.0
    threshold: float = 0.10
    bias: float = 0.0

    def validate(self) -> None:
        ids = set(registry().ids)
        if self.n_stocks < 1:
            raise ConfigError("n_stocks must be >= 1")
        if self.history_quarters < 1:
            raise ConfigError("history_quarters must be >= 1")
        if not 1 <= self.start[1] <= 4:
            raise ConfigError("start quarter must be 1..4")
        if not 0 <= self.missing_rate < 1:
            raise ConfigError("missing_rate must lie in [0, 1)")
        if self.noise_std < 0:
            raise ConfigError("noise_std must be >= 0")
        if not self.threshold > -1:
            raise ConfigError("threshold must exceed -1")
        if not any(w != 0 for w in self.signal_weights.values()):
            raise ConfigError("at least one signal weight must be nonzero")
        named = list(self.signal_weights) + [n for a, b, _ in self.interaction_terms for n in (a, b)]
        unknown = sorted(set(named) - ids)
        if unknown:
            raise ConfigError(f"unknown indicator(s): {', '.join(unknown)}")


def _transform(kind: str, loc: float, scale: float, z: np.ndarray) -> np.ndarray:
    if kind == "lognormal":
        return np.exp(loc + scale * z)
    return loc + scale * z


class _Plant:
    """Vectorized planted score over latent matrices with registry columns."""

    def __init__(self, config: SynthConfig):
        ids = registry().ids
        self.weights = np.array([config.signal_weights.get(i, 0.0) for i in ids])
        self.pairs = [(ids.index(a), ids.index(b), w) for a, b, w in config.interaction_terms]

    def score(self, Z: np.ndarray) -> np.ndarray:
        s = Z @ self.weights
        for a, b, w in self.pairs:
            s = s + w * Z[..., a] * Z[..., b]
        return s


def generate(config: SynthConfig, seed: int) -> list[StockSnapshot]:
    """Snapshots for ``history_quarters + 4`` consecutive quarters per stock.

    The first ``history_quarters`` of them carry a ``future_price``. Stock
    ``i`` draws from child ``i`` of ``seed``.
    """
    config.validate()
    ids = registry().ids
    plant = _Plant(config)
    n_q = config.history_quarters + 4
    width = len(str(config.n_stocks - 1))
    base_period = config.start[0] * 4 + config.start[1] - 1
    log_target = math.log1p(config.threshold) + config.bias
    out = []
    for i, stream in enumerate(np.random.SeedSequence(seed).spawn(config.n_stocks)):
        rng = np.random.default_rng(stream)
        Z = rng.standard_normal((n_q, len(ids)))
        price_z = rng.standard_normal(4)
        noise = rng.standard_normal(n_q)
        masked = rng.random((n_q, len(ids))) < config.missing_rate
        log_ret = log_target + plant.score(Z) + config.noise_std * noise
        log_price = np.empty(n_q)
        kind, loc, scale = PRICE_PROFILE
        log_price[:4] = loc + scale * price_z
        for t in range(4, n_q):
            log_price[t] = log_price[t - 4] + log_ret[t - 4]
        prices = np.exp(log_price)
        values = np.column_stack([_transform(*PROFILE[f], Z[:, j]) for j, f in enumerate(ids)])
        ticker = f"SYN{i:0{width}d}"
        for t in range(n_q):
            year, q = divmod(base_period + t, 4)
            indicators = {f: float(values[t, j]) for j, f in enumerate(ids) if not masked[t, j]}
            future = float(prices[t + 4]) if t + 4 < n_q else None
            out.append(StockSnapshot(ticker, year, q + 1, indicators, float(prices[t]), future))
    return out


class BayesRate(NamedTuple):
    rate: float
    stderr: float


def bayes_rate(config: SynthConfig, n_samples: int = 100_000, seed: int = 0) -> BayesRate:
    """Monte-Carlo accuracy of the ideal rule "Good iff planted score >= -bias".

    Each sample draws fresh latents; the chance that the noise leaves its
    label on the ideal side is averaged exactly (normal CDF), not sampled.
    """
    config.validate()
    if n_samples < 1000:
        raise ConfigError("bayes_rate needs n_samples >= 1000")
    plant = _Plant(config)
    rng = np.random.default_rng(seed)
    hits = np.empty(n_samples)
    chunk = 200_000
    for lo in range(0, n_samples, chunk):
        hi = min(lo + chunk, n_samples)
        margin = plant.score(rng.standard_normal((hi - lo, len(registry())))) + config.bias
        if config.noise_std == 0:
            hits[lo:hi] = 1.0
        else:
            hits[lo:hi] = ndtr(np.abs(margin) / config.noise_std)
    return BayesRate(float(hits.mean()), float(hits.std(ddof=1) / math.sqrt(n_samples)))
