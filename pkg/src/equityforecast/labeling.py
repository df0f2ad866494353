"""Horizon-return labels, labeled-dataset assembly and class balancing."""

from __future__ import annotations

import csv
import enum
import hashlib
import os
from dataclasses import dataclass
from typing import IO, Iterator, Sequence

import numpy as np

from .dataset import FeatureSet, StockSnapshot, format_decimal, parse_decimal, SENTINEL, to_feature_vector
from .errors import BalanceError, DomainError, EmptyDatasetError, LabelingError, ParseError

# relative slack on the threshold comparison so that e.g. 100 -> 110 is
# "10% higher" despite 1.1 * 100 rounding above 110
_REL_TOL = 1e-12


class Label(enum.IntEnum):
    BAD = 0
    GOOD = 1

    def __str__(self) -> str:
        return "Good" if self is Label.GOOD else "Bad"

    @classmethod
    def parse(cls, text: str) -> "Label":
        try:
            return {"good": cls.GOOD, "bad": cls.BAD}[text.strip().lower()]
        except KeyError:
            raise ValueError(f"not a label: {text!r}") from None


def label_move(
    history_price: float, future_price: float, threshold: float = 0.10, strict: bool = False
) -> Label:
    """Good iff ``future_price >= (1 + threshold) * history_price``.

    With ``strict=True`` reaching the target exactly is not enough.
    """
    if not (history_price > 0 and future_price > 0):
        raise DomainError(f"prices must be positive, got {history_price} and {future_price}")
    if not threshold > -1:
        raise DomainError(f"threshold must exceed -1, got {threshold}")
    ratio = future_price / history_price
    target = 1.0 + threshold
    if strict:
        good = ratio > target * (1 + _REL_TOL)
    else:
        good = ratio >= target * (1 - _REL_TOL)
    return Label.GOOD if good else Label.BAD


@dataclass(frozen=True)
class LabeledExample:
    vector: np.ndarray
    label: Label
    ticker: str
    year: int
    quarter: int


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """Feature matrix ``X`` (sentinel-encoded), labels ``y`` (1 = Good) and provenance.

    ``dropped`` counts input snapshots that could not be labeled.
    """

    features: FeatureSet
    X: np.ndarray
    y: np.ndarray
    tickers: tuple[str, ...]
    periods: np.ndarray  # year * 4 + quarter - 1
    dropped: int = 0

    def __post_init__(self):
        X = np.array(self.X, dtype=float, ndmin=2).reshape(-1, len(self.features))
        y = np.asarray(self.y, dtype=np.int8)
        periods = np.asarray(self.periods, dtype=np.int64)
        n = len(X)
        if len(y) != n or len(self.tickers) != n or len(periods) != n:
            raise ValueError("X, y, tickers and periods must have equal length")
        if not np.isin(y, (0, 1)).all():
            raise ValueError("labels must be 0 (Bad) or 1 (Good)")
        if len(set(zip(self.tickers, periods.tolist()))) != n:
            raise LabelingError("duplicate (ticker, quarter) provenance")
        for name, arr in (("X", X), ("y", y), ("periods", periods)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "tickers", tuple(self.tickers))

    def __len__(self) -> int:
        return len(self.y)

    def __iter__(self) -> Iterator[LabeledExample]:
        for i in range(len(self)):
            year, q = divmod(int(self.periods[i]), 4)
            yield LabeledExample(self.X[i], Label(int(self.y[i])), self.tickers[i], year, q + 1)

    @property
    def n_good(self) -> int:
        return int(self.y.sum())

    @property
    def n_bad(self) -> int:
        return len(self) - self.n_good

    def subset(self, rows: Sequence[int] | np.ndarray) -> "LabeledDataset":
        rows = np.asarray(rows, dtype=np.int64)
        return LabeledDataset(
            self.features, self.X[rows], self.y[rows],
            tuple(self.tickers[i] for i in rows), self.periods[rows],
        )

    def select_features(self, features: FeatureSet) -> "LabeledDataset":
        cols = [self.features.index(f) for f in features]
        return LabeledDataset(features, self.X[:, cols], self.y, self.tickers, self.periods, self.dropped)

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update("\n".join(self.features).encode())
        h.update(np.ascontiguousarray(self.X).tobytes())
        h.update(np.ascontiguousarray(self.y).tobytes())
        h.update("\n".join(self.tickers).encode())
        h.update(np.ascontiguousarray(self.periods).tobytes())
        return h.hexdigest()


def build_dataset(
    snapshots: Sequence[StockSnapshot],
    features: FeatureSet,
    horizon_quarters: int = 4,
    threshold: float = 0.10,
    strict: bool = False,
) -> LabeledDataset:
    """Label every snapshot whose same-ticker price ``horizon_quarters`` later is known.

    The later price is the ``history_price`` of the later snapshot; failing
    that, a snapshot's own ``future_price`` is used when the horizon is the
    default four quarters. Several history quarters per ticker give several
    rows. Snapshots without a horizon price are counted in ``dropped``.
    """
    if horizon_quarters < 1:
        raise DomainError("horizon_quarters must be >= 1")
    prices: dict[tuple[str, int], float] = {}
    for s in snapshots:
        key = (s.ticker, s.period)
        if key in prices:
            raise LabelingError(f"duplicate snapshot for {s.ticker} {s.year}Q{s.quarter}")
        prices[key] = s.history_price

    rows, labels, tickers, periods = [], [], [], []
    dropped = 0
    for s in snapshots:
        later = prices.get((s.ticker, s.period + horizon_quarters))
        if later is None and horizon_quarters == 4:
            later = s.future_price
        if later is None:
            dropped += 1
            continue
        rows.append(to_feature_vector(s, features))
        labels.append(int(label_move(s.history_price, later, threshold, strict)))
        tickers.append(s.ticker)
        periods.append(s.period)
    if not rows:
        raise EmptyDatasetError(
            f"no snapshot has a price {horizon_quarters} quarter(s) later ({dropped} dropped)"
        )
    return LabeledDataset(features, np.array(rows), labels, tuple(tickers), periods, dropped)


def balance(dataset: LabeledDataset, seed: int, per_class: int | None = None) -> LabeledDataset:
    """Downsample the majority class to the minority class size.

    ``per_class`` caps both classes at a smaller size (both are then drawn
    at random). Selected rows keep their original relative order.
    """
    good = np.flatnonzero(dataset.y == 1)
    bad = np.flatnonzero(dataset.y == 0)
    if len(good) == 0 or len(bad) == 0:
        raise BalanceError(f"cannot balance: {len(good)} Good, {len(bad)} Bad")
    size = min(len(good), len(bad))
    if per_class is not None:
        if not 1 <= per_class <= size:
            raise BalanceError(f"per_class must be in 1..{size}, got {per_class}")
        size = per_class
    rng = np.random.default_rng(seed)
    keep = []
    for members in (good, bad):
        if len(members) > size:
            members = rng.choice(members, size=size, replace=False)
        keep.append(members)
    return dataset.subset(np.sort(np.concatenate(keep)))


LABEL_COLUMNS = ("label", "ticker", "year", "quarter")


def write_labeled(dataset: LabeledDataset, stream: IO[str], delimiter: str = ",") -> None:
    """Write feature columns then label, ticker, year, quarter."""
    writer = csv.writer(stream, delimiter=delimiter, lineterminator="\n")
    writer.writerow(list(dataset.features) + list(LABEL_COLUMNS))
    for ex in dataset:
        cells = [format_decimal(None if v == SENTINEL else v) for v in ex.vector]
        writer.writerow(cells + [str(ex.label), ex.ticker, ex.year, ex.quarter])


def read_labeled(path: str | os.PathLike, delimiter: str = ",") -> LabeledDataset:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        header = next(reader, None)
        if not header or tuple(header[-4:]) != LABEL_COLUMNS:
            raise ParseError(f"{path}: not a labeled-dataset file (needs trailing {','.join(LABEL_COLUMNS)})")
        try:
            features = FeatureSet(header[:-4])
        except ValueError as exc:
            raise ParseError(f"{path}: {exc}") from exc
        if tuple(features) != tuple(header[:-4]):
            raise ParseError(f"{path}: feature columns are not in canonical order")
        rows, labels, tickers, periods = [], [], [], []
        for cells in reader:
            if not cells:
                continue
            try:
                rows.append([SENTINEL if (v := parse_decimal(c)) is None else v for c in cells[:-4]])
                labels.append(int(Label.parse(cells[-4])))
                year, q = int(cells[-2]), int(cells[-1])
            except ValueError as exc:
                raise ParseError(f"{path}: row {reader.line_num}: {exc}") from exc
            tickers.append(cells[-3])
            periods.append(year * 4 + q - 1)
    if not rows:
        raise EmptyDatasetError(f"{path}: no data rows")
    return LabeledDataset(features, np.array(rows), labels, tuple(tickers), periods)
