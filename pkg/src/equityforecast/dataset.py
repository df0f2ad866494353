"""Indicator registry, snapshot model, snapshot-table I/O and feature vectors.

A snapshot table is a delimited text file with one row per company-quarter::

    ticker,year,quarter,history_price,future_price,book_value,market_cap,...

``ticker``, ``year``, ``quarter`` and ``history_price`` are required,
``future_price`` is optional and every other column must be a registry id.
Empty cells, ``NaN``/``Inf`` tokens and the literal -9999 all mean
"not available".
"""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import ParseError

SENTINEL = -9999.0
HISTORY_PRICE = "history_price"

REQUIRED_COLUMNS = ("ticker", "year", "quarter", HISTORY_PRICE)
OPTIONAL_COLUMNS = ("future_price",)


@dataclass(frozen=True)
class Indicator:
    id: str
    description: str
    unit: str  # currency | ratio | percent | count


# Vendor field names of the eleven-feature subset are kept verbatim; the
# rest are snake-case names in the order listed for the source dataset.
_INDICATORS = (
    Indicator("book_value", "Book value: total assets minus intangibles and liabilities", "currency"),
    Indicator("market_cap", "Market capitalization: share price times shares outstanding", "currency"),
    Indicator("net_price_change_1m", "Change of net price over one month", "currency"),
    Indicator("net_price_pct_change_1m", "Percentage change of net price over one month", "percent"),
    Indicator("DIVIDEND_YIELD", "Dividend yield: yearly dividends relative to share price", "percent"),
    Indicator("BEST_EPS", "Earnings per share", "currency"),
    Indicator("eps_growth", "Earnings per share growth over the trailing year", "percent"),
    Indicator("sales_revenue_turnover", "Sales revenue turnover (opaque decimal)", "currency"),
    Indicator("net_revenue", "Net revenue", "currency"),
    Indicator("net_revenue_growth", "Net revenue growth over the trailing year", "percent"),
    Indicator("sales_growth", "Sales growth over the trailing year", "percent"),
    Indicator("PE_RATIO", "Price to earnings ratio", "ratio"),
    Indicator("pe_ratio_5y_avg", "Price to earnings ratio, five-year average", "ratio"),
    Indicator("PX_TO_BOOK_RATIO", "Price to book ratio", "ratio"),
    Indicator("price_to_sales_ratio", "Price to sales ratio", "ratio"),
    Indicator("BEST_DPS", "Dividend per share", "currency"),
    Indicator("CUR_RATIO", "Current ratio: current assets over current liabilities", "ratio"),
    Indicator("QUICK_RATIO", "Quick ratio: cash, securities and receivables over current liabilities", "ratio"),
    Indicator("TOT_DEBT_TO_TOT_EQY", "Total debt to equity", "ratio"),
    Indicator("analyst_ratio", "Analyst ratio (opaque decimal, scale unknown)", "ratio"),
    Indicator("revenue_growth_5y_cagr", "Revenue growth adjusted by five-year CAGR", "percent"),
    Indicator("profit_margin", "Profit margin: net income over revenue", "percent"),
    Indicator("operating_margin", "Operating margin", "percent"),
    Indicator("unlisted_1", "Unnamed indicator slot (opaque decimal)", "ratio"),
    Indicator("unlisted_2", "Unnamed indicator slot (opaque decimal)", "ratio"),
    Indicator("unlisted_3", "Unnamed indicator slot (opaque decimal)", "ratio"),
    Indicator("unlisted_4", "Unnamed indicator slot (opaque decimal)", "ratio"),
    Indicator("asset_turnover", "Asset turnover: sales relative to assets", "ratio"),
)


@dataclass(frozen=True)
class IndicatorRegistry:
    entries: tuple[Indicator, ...]

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(e.id for e in self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, indicator_id: object) -> bool:
        return indicator_id in _POSITION and indicator_id != HISTORY_PRICE

    def __iter__(self) -> Iterator[Indicator]:
        return iter(self.entries)


_REGISTRY = IndicatorRegistry(_INDICATORS)
# canonical position of every admissible feature id, history_price last
_POSITION = {e.id: i for i, e in enumerate(_INDICATORS)}
_POSITION[HISTORY_PRICE] = len(_INDICATORS)

#: The eleven attributes of the published best-performing subset.
SELECTED_FEATURES = (
    "book_value", "market_cap", "DIVIDEND_YIELD", "BEST_EPS", "PE_RATIO",
    "PX_TO_BOOK_RATIO", "BEST_DPS", "CUR_RATIO", "QUICK_RATIO",
    "TOT_DEBT_TO_TOT_EQY", HISTORY_PRICE,
)


def registry() -> IndicatorRegistry:
    """Return the fixed 28-entry indicator registry."""
    return _REGISTRY


@dataclass(frozen=True)
class FeatureSet:
    """Ordered, duplicate-free feature ids in canonical order.

    Members are re-ordered on construction (registry order, ``history_price``
    last), so ``FeatureSet(["history_price", "book_value"])`` and
    ``FeatureSet(["book_value", "history_price"])`` are equal.
    """

    members: tuple[str, ...]

    def __init__(self, members: Iterable[str]):
        members = tuple(members)
        if not members:
            raise ValueError("feature set must be non-empty")
        unknown = [m for m in members if m not in _POSITION]
        if unknown:
            raise ValueError(f"unknown feature id(s): {', '.join(unknown)}")
        if len(set(members)) != len(members):
            raise ValueError("feature set contains duplicates")
        object.__setattr__(self, "members", tuple(sorted(members, key=_POSITION.__getitem__)))

    @classmethod
    def all(cls, include_history_price: bool = True) -> "FeatureSet":
        ids = list(_REGISTRY.ids)
        if include_history_price:
            ids.append(HISTORY_PRICE)
        return cls(ids)

    @classmethod
    def selected(cls) -> "FeatureSet":
        return cls(SELECTED_FEATURES)

    def without(self, feature_id: str) -> "FeatureSet":
        return FeatureSet(m for m in self.members if m != feature_id)

    def index(self, feature_id: str) -> int:
        return self.members.index(feature_id)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[str]:
        return iter(self.members)

    def __contains__(self, feature_id: object) -> bool:
        return feature_id in self.members


@dataclass(frozen=True)
class StockSnapshot:
    """One company at the end of one quarter."""

    ticker: str
    year: int
    quarter: int
    indicators: Mapping[str, float] = field(default_factory=dict)
    history_price: float = 1.0
    future_price: float | None = None

    def __post_init__(self):
        if not self.ticker:
            raise ValueError("empty ticker")
        if not 1 <= self.quarter <= 4:
            raise ValueError(f"quarter must be 1..4, got {self.quarter}")
        if not (math.isfinite(self.history_price) and self.history_price > 0):
            raise ValueError(f"history_price must be positive, got {self.history_price}")
        if self.future_price is not None and not (
            math.isfinite(self.future_price) and self.future_price > 0
        ):
            raise ValueError(f"future_price must be positive, got {self.future_price}")
        for key, value in self.indicators.items():
            if key not in _REGISTRY:
                raise ValueError(f"unknown indicator {key!r}")
            if not math.isfinite(value) or value == SENTINEL:
                raise ValueError(f"indicator {key} holds a missing marker; omit it instead")

    @property
    def period(self) -> int:
        """Quarter index usable for arithmetic (``year * 4 + quarter - 1``)."""
        return self.year * 4 + self.quarter - 1


@dataclass(frozen=True)
class SchemaConfig:
    delimiter: str = ","
    encoding: str = "utf-8"


@dataclass(frozen=True)
class Diagnostic:
    row: int  # 1-based line number in the file, header is line 1
    reason: str

    def __str__(self) -> str:
        return f"row {self.row}: {self.reason}"


def parse_decimal(token: str) -> float | None:
    """Parse one cell. Returns None for empty, non-finite or sentinel cells.

    Raises ValueError for tokens that are not numbers at all.
    """
    token = token.strip()
    if not token:
        return None
    value = float(token)
    if not math.isfinite(value) or value == SENTINEL:
        return None
    return value


def _check_header(header: Sequence[str]) -> None:
    if not header:
        raise ParseError("empty input: header row required")
    missing = [c for c in REQUIRED_COLUMNS if c not in header]
    if missing:
        raise ParseError(f"header is missing required column(s): {', '.join(missing)}")
    known = set(REQUIRED_COLUMNS) | set(OPTIONAL_COLUMNS) | set(_REGISTRY.ids)
    unknown = [c for c in header if c not in known]
    if unknown:
        raise ParseError(f"header has unknown column(s): {', '.join(unknown)}")
    dupes = sorted({c for c in header if header.count(c) > 1})
    if dupes:
        raise ParseError(f"header repeats column(s): {', '.join(dupes)}")


def _row_to_snapshot(record: dict[str, str]) -> StockSnapshot:
    ticker = record["ticker"].strip()
    try:
        year = int(record["year"])
        quarter = int(record["quarter"])
    except ValueError:
        raise ValueError("year/quarter must be integers") from None
    history = parse_decimal(record[HISTORY_PRICE])
    if history is None:
        raise ValueError("history_price is missing")
    future_cell = record.get("future_price")
    future = parse_decimal(future_cell) if future_cell is not None else None
    indicators = {}
    for key, cell in record.items():
        if key in _REGISTRY:
            try:
                value = parse_decimal(cell)
            except ValueError:
                raise ValueError(f"{key}: not a number: {cell!r}") from None
            if value is not None:
                indicators[key] = value
    return StockSnapshot(ticker, year, quarter, indicators, history, future)


def parse_snapshots(
    stream: IO[bytes] | IO[str], config: SchemaConfig | None = None
) -> tuple[list[StockSnapshot], list[Diagnostic]]:
    """Parse a snapshot table.

    Rows that cannot form a valid :class:`StockSnapshot` are skipped and
    reported as diagnostics; a bad header raises :class:`ParseError`.
    """
    config = config or SchemaConfig()
    if isinstance(stream.read(0), bytes):
        stream = io.TextIOWrapper(stream, encoding=config.encoding, newline="")
    reader = csv.reader(stream, delimiter=config.delimiter)
    try:
        header = [h.strip() for h in next(reader, [])]
    except UnicodeDecodeError as exc:
        raise ParseError(f"input is not {config.encoding}: {exc}") from exc
    _check_header(header)

    snapshots, diagnostics = [], []
    for cells in reader:
        line = reader.line_num
        if not any(c.strip() for c in cells):
            continue
        if len(cells) != len(header):
            diagnostics.append(Diagnostic(line, f"expected {len(header)} cells, got {len(cells)}"))
            continue
        try:
            snapshots.append(_row_to_snapshot(dict(zip(header, cells))))
        except ValueError as exc:
            diagnostics.append(Diagnostic(line, str(exc)))
    return snapshots, diagnostics


def read_snapshots(
    path: str | os.PathLike, config: SchemaConfig | None = None
) -> tuple[list[StockSnapshot], list[Diagnostic]]:
    with open(path, "rb") as fh:
        return parse_snapshots(fh, config)


def format_decimal(value: float | None) -> str:
    return "" if value is None else repr(float(value))


def write_snapshots(
    snapshots: Iterable[StockSnapshot], stream: IO[str], config: SchemaConfig | None = None
) -> None:
    config = config or SchemaConfig()
    writer = csv.writer(stream, delimiter=config.delimiter, lineterminator="\n")
    writer.writerow(list(REQUIRED_COLUMNS) + list(OPTIONAL_COLUMNS) + list(_REGISTRY.ids))
    for s in snapshots:
        writer.writerow(
            [s.ticker, s.year, s.quarter, format_decimal(s.history_price), format_decimal(s.future_price)]
            + [format_decimal(s.indicators.get(i)) for i in _REGISTRY.ids]
        )


def to_feature_vector(snapshot: StockSnapshot, features: FeatureSet) -> np.ndarray:
    """Project a snapshot onto ``features``; absent values become -9999."""
    out = np.empty(len(features))
    for i, fid in enumerate(features.members):
        if fid == HISTORY_PRICE:
            out[i] = snapshot.history_price
        else:
            out[i] = snapshot.indicators.get(fid, SENTINEL)
    return out


def to_matrix(snapshots: Sequence[StockSnapshot], features: FeatureSet) -> np.ndarray:
    X = np.empty((len(snapshots), len(features)))
    for row, snapshot in enumerate(snapshots):
        X[row] = to_feature_vector(snapshot, features)
    return X


def read_feature_list(path: str | os.PathLike) -> FeatureSet:
    """Read a feature-list file: one id per line, ``#`` starts a comment."""
    ids = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            token = line.split("#", 1)[0].strip()
            if token:
                ids.append(token)
    try:
        return FeatureSet(ids)
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def write_feature_list(features: FeatureSet, stream: IO[str]) -> None:
    for fid in features:
        stream.write(fid + "\n")


def schema_markdown() -> str:
    """Registry and column schema as a markdown document."""
    lines = [
        "# Snapshot table schema",
        "",
        "Delimited text, UTF-8, header row required. Empty cells, NaN/Inf and -9999 mean missing.",
        "",
        "| column | required | unit | description |",
        "|---|---|---|---|",
        "| ticker | yes | - | company identifier |",
        "| year | yes | count | calendar year of the quarter end |",
        "| quarter | yes | count | 1..4 |",
        "| history_price | yes | currency | price at the quarter end, > 0 |",
        "| future_price | no | currency | price four quarters later, > 0 |",
    ]
    for e in _REGISTRY:
        lines.append(f"| {e.id} | no | {e.unit} | {e.description} |")
    lines += ["", "Feature `history_price` is a pseudo-feature read from the price column."]
    return "\n".join(lines) + "\n"
