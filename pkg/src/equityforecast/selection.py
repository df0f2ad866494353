"""Greedy backward elimination driven by cross-validated F-score."""

from __future__ import annotations

from dataclasses import dataclass

from .dataset import FeatureSet
from .errors import EvaluationError
from .evaluation import FoldAssignment, cross_validate, stratified_folds
from .learners import LearnerSpec


@dataclass(frozen=True)
class SelectionStep:
    pass_index: int
    removed: str
    score_before: float
    score_after: float
    accepted: bool


@dataclass(frozen=True)
class SelectionResult:
    selected: FeatureSet
    initial: FeatureSet
    initial_score: float
    final_score: float
    trace: tuple[SelectionStep, ...]
    spec: LearnerSpec
    k: int
    seed: int

    def replay(self) -> FeatureSet:
        """Apply the accepted removals of the trace to the initial set."""
        features = self.initial
        for step in self.trace:
            if step.accepted:
                features = features.without(step.removed)
        return features

    def format_trace(self) -> str:
        lines = [f"{'pass':>4}  {'candidate':<24}  {'before':>7}  {'after':>7}  accepted"]
        for s in self.trace:
            lines.append(
                f"{s.pass_index:>4}  {s.removed:<24}  {s.score_before:>7.4f}  {s.score_after:>7.4f}  "
                f"{'yes' if s.accepted else ''}"
            )
        return "\n".join(lines) + "\n"


def _score(spec, dataset, features, folds, threads) -> float:
    return cross_validate(spec, dataset.select_features(features), folds=folds, threads=threads).f_score


def backward_eliminate(
    dataset, spec: LearnerSpec, k: int = 10, seed: int = 0, threads: int = 1
) -> SelectionResult:
    """Drop one feature per pass while the CV F-score does not decrease.

    Each pass scores every remaining feature's removal on one fixed fold
    assignment and removes the best candidate when its score is >= the
    current score (ties: the candidate listed first in canonical order).
    Stops when no removal qualifies or one feature is left.
    """
    features = dataset.features
    if len(features) < 2:
        raise EvaluationError("backward elimination needs at least two features")
    folds: FoldAssignment = stratified_folds(dataset, k, seed)
    current = _score(spec, dataset, features, folds, threads)
    initial_score = current
    trace = []
    pass_index = 0
    while len(features) > 1:
        candidates = []
        for fid in features:
            try:
                score = _score(spec, dataset, features.without(fid), folds, threads)
            except EvaluationError as exc:
                raise EvaluationError(f"while scoring removal of {fid}: {exc}") from exc
            candidates.append((fid, score))
        best_fid, best_score = candidates[0]
        for fid, score in candidates[1:]:
            if score > best_score:
                best_fid, best_score = fid, score
        accept = best_score >= current
        for fid, score in candidates:
            trace.append(SelectionStep(pass_index, fid, current, score, accept and fid == best_fid))
        if not accept:
            break
        features = features.without(best_fid)
        current = best_score
        pass_index += 1
    return SelectionResult(features, dataset.features, initial_score, current, tuple(trace), spec, k, seed)
