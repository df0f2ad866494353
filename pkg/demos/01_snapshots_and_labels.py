"""
Snapshots, labels and balancing
===============================

A snapshot table has one row per company-quarter. Labels come from the
same company's price four quarters later: Good when it rose at least 10%.
"""

import io

import numpy as np

from equityforecast import dataset as ds
from equityforecast.labeling import Label, balance, build_dataset, label_move

table = """ticker,year,quarter,history_price,PE_RATIO,CUR_RATIO
AAA,2014,3,10.0,14.2,1.5
AAA,2014,4,10.0,15.0,
AAA,2015,3,10.5,13.1,1.4
AAA,2015,4,12.0,12.8,1.6
BBB,2014,4,40.0,-9999,0.9
BBB,2015,4,38.0,22.0,0.8
CCC,2014,4,-3,11.0,1.0
"""
snapshots, diagnostics = ds.parse_snapshots(io.StringIO(table))
print(len(snapshots), "snapshots")
for d in diagnostics:
    print("skipped", d)

# the boundary counts as Good; --strict moves it to Bad
print(label_move(100, 110), label_move(100, 110, strict=True))

features = ds.FeatureSet(["PE_RATIO", "CUR_RATIO", "history_price"])
data = build_dataset(snapshots, features)
for ex in data:
    print(ex.ticker, ex.year, ex.quarter, ex.label, ex.vector)
print("dropped (no price a year later):", data.dropped)

# -9999 marks a value that is not available
print(ds.to_feature_vector(snapshots[1], features))

# downsample the majority class
y = np.array([1] * 3 + [0] * 7)
many = build_dataset(
    [ds.StockSnapshot(f"T{i}", 2014, 4, {"PE_RATIO": float(i)}, 10.0, 12.0 if good else 9.0)
     for i, good in enumerate(y)],
    ds.FeatureSet(["PE_RATIO"]),
)
even = balance(many, seed=1)
print(many.n_good, many.n_bad, "->", even.n_good, even.n_bad)
print(Label.parse("Good") is Label.GOOD)
