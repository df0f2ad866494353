"""
Saving and loading models
=========================

Model files are canonical JSON: the same model always gives the same
bytes, and a file written by another format version is refused.
"""

import json
import os
import tempfile

import numpy as np

from equityforecast.dataset import FeatureSet
from equityforecast.errors import ModelVersionError
from equityforecast.labeling import balance, build_dataset
from equityforecast.learners import LearnerSpec, predict_proba, train
from equityforecast.persistence import dumps, load_model, loads, save_model
from equityforecast.synth import SynthConfig, generate

data = balance(build_dataset(generate(SynthConfig(n_stocks=150), seed=2), FeatureSet.selected()), seed=2)
model = train(LearnerSpec("random_forest", {"n_trees": 10}, seed=2), data)

with tempfile.TemporaryDirectory() as tmp:
    path = os.path.join(tmp, "forest.json")
    print("sha256", save_model(model, path, {"seed": 2}))
    back = load_model(path)
    print("same scores:", np.array_equal(predict_proba(back, data.X), predict_proba(model, data.X)))

doc = json.loads(dumps(model))
doc["version"] += 1
try:
    loads(json.dumps(doc))
except ModelVersionError as exc:
    print("refused:", exc)
