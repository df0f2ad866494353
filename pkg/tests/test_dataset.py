import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from equityforecast.dataset import (
    SELECTED_FEATURES, SENTINEL, FeatureSet, StockSnapshot, parse_snapshots, read_feature_list,
    registry, to_feature_vector, write_snapshots,
)
from equityforecast.errors import ParseError


def test_registry_has_28_entries_book_value_first_asset_turnover_last():
    reg = registry()
    assert len(reg) == 28
    assert reg.entries[0].id == "book_value"
    assert reg.entries[-1].id == "asset_turnover"
    assert len(set(reg.ids)) == 28
    assert registry() == reg


def test_selected_features_are_registry_ids_plus_history_price():
    ids = set(registry().ids)
    assert len(SELECTED_FEATURES) == 11
    assert set(SELECTED_FEATURES) - {"history_price"} <= ids


def test_units_are_known():
    assert {e.unit for e in registry()} <= {"currency", "ratio", "percent", "count"}


def test_feature_set_is_canonicalized():
    fs = FeatureSet(["history_price", "PE_RATIO", "book_value"])
    assert fs.members == ("book_value", "PE_RATIO", "history_price")
    assert fs == FeatureSet(["book_value", "history_price", "PE_RATIO"])


@pytest.mark.parametrize("members", [[], ["book_value", "book_value"], ["nope"]])
def test_feature_set_rejects_bad_members(members):
    with pytest.raises(ValueError):
        FeatureSet(members)


HEADER = "ticker,year,quarter,history_price,future_price,book_value,PE_RATIO,DIVIDEND_YIELD\n"


def parse(text):
    return parse_snapshots(io.BytesIO(text.encode()))


def test_one_complete_row():
    snaps, diags = parse(HEADER + "AAA,2014,4,10.5,12,100,15.5,2.1\n")
    assert diags == []
    assert len(snaps) == 1
    s = snaps[0]
    assert (s.ticker, s.year, s.quarter, s.history_price, s.future_price) == ("AAA", 2014, 4, 10.5, 12.0)
    assert s.indicators == {"book_value": 100.0, "PE_RATIO": 15.5, "DIVIDEND_YIELD": 2.1}


def test_empty_cell_means_absent():
    snaps, _ = parse(HEADER + "AAA,2014,4,10.5,,100,,2.1\n")
    assert "PE_RATIO" not in snaps[0].indicators
    assert snaps[0].future_price is None


def test_negative_price_row_is_reported_not_parsed():
    snaps, diags = parse(HEADER + "AAA,2014,4,-5,,100,15,2\n")
    assert snaps == []
    assert len(diags) == 1
    assert diags[0].row == 2
    assert "history_price" in diags[0].reason


def test_bad_rows_are_skipped_good_rows_kept():
    text = HEADER + "AAA,2014,4,10,,1,2,3\nBBB,2014,5,10,,1,2,3\nCCC,2014,1,10,,x,2,3\nDDD,2014,1,10,,1,2\nEEE,2015,1,9,,,,\n"
    snaps, diags = parse(text)
    assert [s.ticker for s in snaps] == ["AAA", "EEE"]
    assert [d.row for d in diags] == [3, 4, 5]


def test_scientific_notation_nan_inf_and_sentinel():
    snaps, diags = parse(HEADER + "AAA,2014,4,1e2,,1.5E3,NaN,-9999\nBBB,2014,4,3,,inf,-9999.0,-1e-2\n")
    assert diags == []
    assert snaps[0].history_price == 100.0
    assert snaps[0].indicators == {"book_value": 1500.0}
    assert snaps[1].indicators == {"DIVIDEND_YIELD": -0.01}


@pytest.mark.parametrize(
    "header, missing",
    [("ticker,year,history_price\n", "quarter"), ("ticker,year,quarter,history_price,bogus\n", "bogus")],
)
def test_malformed_header_is_fatal_and_names_the_column(header, missing):
    with pytest.raises(ParseError, match=missing):
        parse(header)


def test_text_stream_and_custom_delimiter():
    from equityforecast.dataset import SchemaConfig
    text = HEADER.replace(",", ";") + "AAA;2014;4;10;;1;2;3\n"
    snaps, _ = parse_snapshots(io.StringIO(text), SchemaConfig(delimiter=";"))
    assert snaps[0].indicators["DIVIDEND_YIELD"] == 3.0


def test_non_utf8_is_a_parse_error():
    with pytest.raises(ParseError):
        parse_snapshots(io.BytesIO(b"\xff\xfe\x00bad"))


def test_feature_vector_sentinel_for_absent():
    s = StockSnapshot("A", 2014, 4, {"PE_RATIO": 12.0}, 42.5)
    assert to_feature_vector(s, FeatureSet(["DIVIDEND_YIELD"])).tolist() == [SENTINEL]
    assert to_feature_vector(s, FeatureSet(["history_price"])).tolist() == [42.5]


def test_feature_vector_projects_selected_in_canonical_order():
    values = {f: float(i + 1) for i, f in enumerate(SELECTED_FEATURES[:-1])}
    s = StockSnapshot("A", 2014, 4, values, 99.0)
    vec = to_feature_vector(s, FeatureSet(reversed(SELECTED_FEATURES)))
    assert vec.tolist() == [float(i + 1) for i in range(10)] + [99.0]


def test_snapshot_rejects_sentinel_and_unknown_indicator():
    with pytest.raises(ValueError):
        StockSnapshot("A", 2014, 1, {"PE_RATIO": SENTINEL}, 1.0)
    with pytest.raises(ValueError):
        StockSnapshot("A", 2014, 1, {"history_price": 3.0}, 1.0)


def test_feature_list_file(tmp_path):
    path = tmp_path / "f.txt"
    path.write_text("# chosen\nPE_RATIO\n\nbook_value  # first\n")
    assert read_feature_list(path).members == ("book_value", "PE_RATIO")
    path.write_text("PE_RATIO\nnope\n")
    with pytest.raises(ParseError):
        read_feature_list(path)


finite = st.floats(min_value=-1e12, max_value=1e12, allow_nan=False).filter(lambda v: v != SENTINEL)
positive = st.floats(min_value=1e-6, max_value=1e9, allow_nan=False)
snapshots = st.builds(
    StockSnapshot,
    ticker=st.text(alphabet="ABCDEFGHXYZ", min_size=1, max_size=5),
    year=st.integers(1990, 2030),
    quarter=st.integers(1, 4),
    indicators=st.dictionaries(st.sampled_from(registry().ids), finite, max_size=10),
    history_price=positive,
    future_price=st.none() | positive,
)


@settings(max_examples=60, deadline=None)
@given(st.lists(snapshots, max_size=8))
def test_round_trip_write_then_parse(snaps):
    buf = io.StringIO()
    write_snapshots(snaps, buf)
    back, diags = parse_snapshots(io.StringIO(buf.getvalue()))
    assert diags == []
    assert back == snaps


@settings(max_examples=60, deadline=None)
@given(snapshots, st.sets(st.sampled_from(registry().ids + ("history_price",)), min_size=1))
def test_vector_length_and_sentinel_only_where_absent(snap, ids):
    fs = FeatureSet(ids)
    vec = to_feature_vector(snap, fs)
    assert len(vec) == len(fs)
    for fid, v in zip(fs, vec):
        present = fid == "history_price" or fid in snap.indicators
        assert (v == SENTINEL) == (not present)
        assert math.isfinite(v)
