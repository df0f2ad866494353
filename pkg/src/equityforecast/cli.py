"""Command-line pipeline: schema, synth, label, balance, train, evaluate, select-features, predict.

Typical run::

    equityforecast synth --output snaps.csv --seed 1
    equityforecast label --input snaps.csv --output labeled.csv
    equityforecast balance --input labeled.csv --output balanced.csv --seed 1
    equityforecast evaluate --input balanced.csv --algo random_forest --seed 1 --output report.json

Exit codes: 0 success, 1 usage, 2 input/parse, 3 labeling, 4 training,
5 evaluation, 6 I/O.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Any, Sequence

from . import dataset as ds
from . import labeling, persistence, synth
from .errors import ConfigError, EquityForecastError
from .evaluation import cross_validate, format_table, paired_t_test, stratified_folds
from .learners import ALGORITHMS, HYPERPARAMETERS, LearnerSpec, labels_from_scores, predict_proba, train
from .selection import backward_eliminate

DEFAULT_SEED = 0
EXIT_USAGE, EXIT_IO = 1, 6

# flag -> (default, type); also the admissible keys of a --config file
SETTINGS: dict[str, tuple[Any, type]] = {
    "input": (None, str),
    "output": (None, str),
    "features": (None, str),
    "model": (None, str),
    "algo": ("random_forest", str),
    "threshold": (0.10, float),
    "horizon": (4, int),
    "k": (10, int),
    "seed": (DEFAULT_SEED, int),
    "threads": (1, int),
    "strict": (False, bool),
    "per_class": (None, int),
    "n_stocks": (1739, int),
    "history_quarters": (4, int),
    "noise_std": (synth.SynthConfig.noise_std, float),
    "missing_rate": (0.0, float),
}


class UsageError(EquityForecastError):
    exit_code = EXIT_USAGE


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _to_bool(text: str) -> bool:
    lowered = str(text).strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def read_config(path: str) -> dict[str, Any]:
    """Flat ``key = value`` file; keys are flag names, ``#`` starts a comment."""
    out: dict[str, Any] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, value = (part.strip() for part in line.split("=", 1))
            key = key.lstrip("-").replace("-", "_")
            if key == "param":
                out.setdefault("param", []).append(value)
                continue
            if key not in SETTINGS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            kind = SETTINGS[key][1]
            try:
                out[key] = _to_bool(value) if kind is bool else kind(value)
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: {exc}") from None
    return out


def _settings(args: argparse.Namespace) -> dict[str, Any]:
    """Defaults, overridden by the config file, overridden by flags."""
    merged = {key: default for key, (default, _) in SETTINGS.items()}
    merged["param"] = []
    if args.config:
        merged.update(read_config(args.config))
    for key in SETTINGS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    if args.param:
        merged["param"] = list(merged["param"]) + list(args.param)
    return merged


def _parse_value(text: str) -> Any:
    lowered = text.strip().lower()
    if lowered in ("none", "null"):
        return None
    if lowered in ("true", "false"):
        return lowered == "true"
    for kind in (int, float):
        try:
            return kind(text)
        except ValueError:
            pass
    return text


def _hyperparameters(algo: str, params: Sequence[str]) -> dict[str, Any]:
    out = {}
    for item in params:
        if "=" not in item:
            raise UsageError(f"--param expects name=value, got {item!r}")
        name, value = item.split("=", 1)
        out[name.strip()] = _parse_value(value)
    allowed = HYPERPARAMETERS.get(algo, {})
    unknown = sorted(set(out) - set(allowed))
    if unknown:
        raise UsageError(f"{algo} has no hyperparameter(s) {', '.join(unknown)}")
    return out


def _require(cfg: dict, key: str) -> str:
    if not cfg.get(key):
        raise UsageError(f"--{key} is required")
    return cfg[key]


def _check_input(path: str) -> str:
    if not os.path.isfile(path):
        raise FileNotFoundError(f"input file not found: {path}")
    return path


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _load_labeled(cfg) -> labeling.LabeledDataset:
    data = labeling.read_labeled(_check_input(_require(cfg, "input")))
    if cfg["features"]:
        data = data.select_features(ds.read_feature_list(_check_input(cfg["features"])))
    return data


def _spec(cfg, algo: str | None = None) -> LearnerSpec:
    algo = algo or cfg["algo"]
    if algo not in ALGORITHMS:
        raise UsageError(f"unknown algorithm {algo!r}; choose from {', '.join(ALGORITHMS)}")
    return LearnerSpec(algo, _hyperparameters(algo, cfg["param"]), seed=cfg["seed"])


def cmd_schema(cfg) -> int:
    _write_text(cfg["output"], ds.schema_markdown())
    return 0


def cmd_synth(cfg) -> int:
    config = synth.SynthConfig(
        n_stocks=cfg["n_stocks"], history_quarters=cfg["history_quarters"], noise_std=cfg["noise_std"],
        missing_rate=cfg["missing_rate"], threshold=cfg["threshold"],
    )
    snapshots = synth.generate(config, cfg["seed"])
    out = _require(cfg, "output")
    with open(out, "w", encoding="utf-8", newline="") as fh:
        ds.write_snapshots(snapshots, fh)
    print(f"wrote {len(snapshots)} snapshots for {config.n_stocks} stocks to {out}")
    return 0


def _read_snapshots(path: str) -> list[ds.StockSnapshot]:
    snapshots, diagnostics = ds.read_snapshots(_check_input(path))
    for d in diagnostics:
        print(f"warning: {path}: {d}", file=sys.stderr)
    return snapshots


def cmd_label(cfg) -> int:
    snapshots = _read_snapshots(_require(cfg, "input"))
    features = ds.read_feature_list(_check_input(cfg["features"])) if cfg["features"] else ds.FeatureSet.all()
    data = labeling.build_dataset(snapshots, features, cfg["horizon"], cfg["threshold"], cfg["strict"])
    out = _require(cfg, "output")
    with open(out, "w", encoding="utf-8", newline="") as fh:
        labeling.write_labeled(data, fh)
    print(f"labeled {len(data)} rows: {data.n_good} Good, {data.n_bad} Bad ({data.dropped} snapshots dropped)")
    return 0


def cmd_balance(cfg) -> int:
    data = labeling.balance(_load_labeled(cfg), cfg["seed"], cfg["per_class"])
    out = _require(cfg, "output")
    with open(out, "w", encoding="utf-8", newline="") as fh:
        labeling.write_labeled(data, fh)
    print(f"balanced to {len(data)} rows: {data.n_good} Good, {data.n_bad} Bad")
    return 0


def cmd_train(cfg) -> int:
    data = _load_labeled(cfg)
    spec = _spec(cfg)
    model = train(spec, data, threads=cfg["threads"])
    metadata = {"dataset_digest": data.digest(), "seed": spec.seed, "trained_at": None}
    digest = persistence.save_model(model, _require(cfg, "output"), metadata)
    print(f"model sha256 {digest}")
    return 0


def cmd_evaluate(cfg) -> int:
    data = _load_labeled(cfg)
    algos = [a.strip() for a in cfg["algo"].split(",") if a.strip()]
    folds = stratified_folds(data, cfg["k"], cfg["seed"])
    reports = [
        cross_validate(_spec(cfg, a), data, cfg["k"], cfg["seed"], folds=folds, threads=cfg["threads"])
        for a in algos
    ]
    doc: dict[str, Any] = {"dataset_digest": data.digest(), "reports": [r.to_dict() for r in reports]}
    tests = []
    for other in reports[1:]:
        t = paired_t_test(reports[0].fold_f, other.fold_f)
        tests.append({"a": reports[0].algorithm, "b": other.algorithm, "t": t.t, "p": t.p,
                      "significant": t.significant, "alpha": t.alpha})
    if tests:
        doc["paired_t_tests"] = tests
    if cfg["output"]:
        _write_text(cfg["output"], json.dumps(doc, sort_keys=True, indent=2) + "\n")
    sys.stdout.write(format_table(reports))
    for t in tests:
        mark = "significant" if t["significant"] else "not significant"
        print(f"paired t-test {t['a']} vs {t['b']}: t={t['t']:.3f} p={t['p']:.4g} ({mark} at {t['alpha']})")
    return 0


def cmd_select(cfg) -> int:
    data = _load_labeled(cfg)
    result = backward_eliminate(data, _spec(cfg), cfg["k"], cfg["seed"], threads=cfg["threads"])
    sys.stdout.write(result.format_trace())
    print(f"selected {len(result.selected)} of {len(result.initial)} features, "
          f"F {result.initial_score:.4f} -> {result.final_score:.4f}")
    out = _require(cfg, "output")
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        ds.write_feature_list(result.selected, fh)
    return 0


def cmd_predict(cfg) -> int:
    model = persistence.load_model(_check_input(_require(cfg, "model")))
    snapshots = _read_snapshots(_require(cfg, "input"))
    X = ds.to_matrix(snapshots, model.features)
    scores = predict_proba(model, X) if len(X) else []
    labels = labels_from_scores(scores)
    lines = [
        f"{s.ticker},{labeling.Label(int(lab))},{score!r}"
        for s, lab, score in zip(snapshots, labels, map(float, scores))
    ]
    _write_text(cfg["output"], "".join(line + "\n" for line in lines))
    return 0


COMMANDS = {
    "schema": (cmd_schema, "print the snapshot column schema and indicator registry"),
    "synth": (cmd_synth, "write a synthetic snapshot file"),
    "label": (cmd_label, "label snapshots Good/Bad by their price one horizon later"),
    "balance": (cmd_balance, "downsample the majority class of a labeled file"),
    "train": (cmd_train, "train a model and save it"),
    "evaluate": (cmd_evaluate, "stratified k-fold cross-validation report"),
    "select-features": (cmd_select, "greedy backward feature elimination"),
    "predict": (cmd_predict, "score snapshots with a saved model"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="equityforecast", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="key = value file with defaults for these flags")
        p.add_argument("--input")
        p.add_argument("--output")
        p.add_argument("--features", help="feature-list file, one id per line")
        p.add_argument("--model")
        p.add_argument("--algo", help=f"one of {', '.join(ALGORITHMS)} (evaluate: comma list)")
        p.add_argument("--param", action="append", metavar="NAME=VALUE", help="learner hyperparameter")
        p.add_argument("--threshold", type=float)
        p.add_argument("--horizon", type=int)
        p.add_argument("--strict", action="store_const", const=True, help="require strictly more than the threshold")
        p.add_argument("--k", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--threads", type=int)
        p.add_argument("--per-class", dest="per_class", type=int)
        p.add_argument("--n-stocks", dest="n_stocks", type=int)
        p.add_argument("--history-quarters", dest="history_quarters", type=int)
        p.add_argument("--noise-std", dest="noise_std", type=float)
        p.add_argument("--missing-rate", dest="missing_rate", type=float)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = _settings(args)
        if cfg["threads"] < 1:
            raise UsageError("--threads must be >= 1")
        return COMMANDS[args.command][0](cfg)
    except EquityForecastError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
