"""Long-horizon equity movement classification from quarterly fundamentals."""

from .dataset import (
    HISTORY_PRICE, SELECTED_FEATURES, SENTINEL, FeatureSet, StockSnapshot, parse_snapshots,
    read_snapshots, registry, to_feature_vector, write_snapshots,
)
from .labeling import Label, LabeledDataset, balance, build_dataset, label_move

__version__ = "0.1.0"
