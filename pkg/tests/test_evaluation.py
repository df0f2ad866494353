import math
import statistics
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from equityforecast.errors import EvaluationError, StratificationError
from equityforecast.evaluation import (
    ConfusionMatrix, cross_validate, format_table, paired_t_test, stratified_folds, weighted_prf,
)
from equityforecast.learners import LearnerSpec

from conftest import make_dataset


def balanced(n_per_class, seed=0):
    rng = np.random.default_rng(seed)
    y = rng.permutation(np.repeat([0, 1], n_per_class))
    return make_dataset(rng.normal(size=(2 * n_per_class, 3)), y)


# --- folds ----------------------------------------------------------------------

def test_twenty_examples_ten_folds_one_of_each():
    data = balanced(10)
    folds = stratified_folds(data, 10, seed=4)
    for f in range(10):
        rows = folds.test_rows(f)
        assert sorted(data.y[rows].tolist()) == [0, 1]


def test_1298_rows_give_folds_of_129_or_130():
    data = balanced(649)
    folds = stratified_folds(data, 10, seed=1)
    sizes = np.bincount(folds.folds, minlength=10)
    assert set(sizes.tolist()) == {129, 130}
    assert sizes.sum() == 1298
    for f in range(10):
        good = int(data.y[folds.test_rows(f)].sum())
        assert abs(good - 64.9) <= 1
        assert abs((sizes[f] - good) - 64.9) <= 1


def test_folds_are_deterministic():
    data = balanced(50)
    assert stratified_folds(data, 10, 3) == stratified_folds(data, 10, 3)
    assert stratified_folds(data, 10, 3) != stratified_folds(data, 10, 4)


def test_small_class_or_k_rejected():
    with pytest.raises(StratificationError):
        stratified_folds(balanced(5), 10, 0)
    with pytest.raises(StratificationError):
        stratified_folds(balanced(5), 1, 0)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 12), st.integers(0, 60), st.integers(0, 60), st.integers(0, 10**6))
def test_folds_partition_and_stratify(k, extra_good, extra_bad, seed):
    n_good, n_bad = k + extra_good, k + extra_bad
    y = np.array([1] * n_good + [0] * n_bad)
    folds = stratified_folds(make_dataset(np.zeros((len(y), 1)), y), k, seed)
    assert folds.folds.min() >= 0 and folds.folds.max() < k
    sizes = np.bincount(folds.folds, minlength=k)
    assert sizes.max() - sizes.min() <= 1
    for cls, n in ((1, n_good), (0, n_bad)):
        per_fold = np.bincount(folds.folds[y == cls], minlength=k)
        assert (np.abs(per_fold - n / k) < 1).all()


# --- weighted P/R/F ---------------------------------------------------------------

def oracle_prf(tp, fp, fn, tn):
    """Exact rational support-weighted P/R/F."""
    def one(hit, pred, actual):
        p = Fraction(hit, pred) if pred else Fraction(0)
        r = Fraction(hit, actual) if actual else Fraction(0)
        f = 2 * p * r / (p + r) if p + r else Fraction(0)
        return p, r, f
    total = tp + fp + fn + tn
    g, b = one(tp, tp + fp, tp + fn), one(tn, tn + fn, tn + fp)
    wg, wb = Fraction(tp + fn, total), Fraction(tn + fp, total)
    return tuple(float(wg * x + wb * z) for x, z in zip(g, b))


CONFUSIONS = [
    (5, 0, 0, 5), (5, 5, 0, 0), (3, 3, 3, 3), (60, 11, 9, 50), (0, 0, 7, 3), (1, 0, 0, 0),
    (12, 30, 1, 2), (100, 1, 1, 100), (7, 2, 5, 20), (0, 4, 4, 0),
]


@pytest.mark.parametrize("counts", CONFUSIONS)
def test_weighted_prf_matches_exact_arithmetic(counts):
    got = weighted_prf(ConfusionMatrix(*counts))
    for g, want in zip(got, oracle_prf(*counts)):
        assert g == pytest.approx(want, abs=1e-12)
        assert 0.0 <= g <= 1.0


def test_weighted_prf_named_cases():
    assert weighted_prf(ConfusionMatrix(5, 0, 0, 5)) == (1.0, 1.0, 1.0)
    p, r, f = weighted_prf(ConfusionMatrix(5, 5, 0, 0))
    assert (p, r) == (0.25, 0.5)
    assert f == pytest.approx(1 / 3, abs=1e-12)
    assert weighted_prf(ConfusionMatrix(4, 4, 4, 4)) == pytest.approx((0.5, 0.5, 0.5), abs=1e-12)


def test_weighted_prf_empty_matrix_rejected():
    with pytest.raises(EvaluationError):
        weighted_prf(ConfusionMatrix())


@settings(max_examples=100)
@given(st.integers(0, 50), st.integers(0, 50))
def test_balanced_weighted_equals_macro(tp, tn):
    # 50 Good, 50 Bad
    c = ConfusionMatrix(tp, 50 - tn, 50 - tp, tn)
    good = (tp / (tp + 50 - tn) if tp + 50 - tn else 0.0, tp / 50)
    bad = (tn / (tn + 50 - tp) if tn + 50 - tp else 0.0, tn / 50)
    p, r, _ = weighted_prf(c)
    assert p == pytest.approx((good[0] + bad[0]) / 2, abs=1e-12)
    assert r == pytest.approx((good[1] + bad[1]) / 2, abs=1e-12)


# --- cross-validation -------------------------------------------------------------

def test_report_pools_folds(planted):
    report = cross_validate(LearnerSpec("naive_bayes"), planted, k=5, seed=2)
    pooled = report.pooled
    assert pooled.total == len(planted)
    assert (report.precision, report.recall, report.f_score) == pytest.approx(weighted_prf(pooled), abs=1e-12)
    assert report.accuracy == pooled.accuracy
    assert len(report.fold_f) == 5
    assert report.f_score > 0.8
    assert report.to_dict()["folds"][0]["tp"] == report.fold_confusions[0].tp
    assert "naive_bayes" in format_table([report])


def test_memorizing_learner_on_noise_is_at_chance():
    spec = LearnerSpec("c45_tree", {"prune": False, "min_leaf": 1})
    scores = []
    for seed in range(5):
        rng = np.random.default_rng(100 + seed)
        data = make_dataset(rng.normal(size=(300, 4)), rng.permutation(np.repeat([0, 1], 150)))
        scores.append(cross_validate(spec, data, k=10, seed=seed).f_score)
    assert abs(np.mean(scores) - 0.5) <= 0.05


def test_constant_learner_recall_equals_prevalence():
    # a single all-Good leaf predicts Good everywhere
    y = np.array([1] * 30 + [0] * 20)
    data = make_dataset(np.zeros((50, 1)), y)
    report = cross_validate(LearnerSpec("c45_tree"), data, k=5, seed=0)
    assert report.recall == pytest.approx(0.6, abs=1e-12)


def test_training_errors_carry_the_fold_index():
    y = np.array([1] * 10 + [0] * 10)
    data = make_dataset(np.zeros((20, 1)), y)
    with pytest.raises(EvaluationError, match="fold 0: need ridge"):
        cross_validate(LearnerSpec("logistic", {"max_iter": -1}), data, k=2, seed=0)


# --- paired t-test ---------------------------------------------------------------

def oracle_t(a, b):
    d = [x - y for x, y in zip(a, b)]
    n = len(d)
    t = statistics.mean(d) / (statistics.stdev(d) / math.sqrt(n))
    nu = n - 1
    dens = lambda x: mpmath.gamma((nu + 1) / 2) / (mpmath.sqrt(nu * mpmath.pi) * mpmath.gamma(nu / 2)) \
        * (1 + x * x / nu) ** (-(nu + 1) / 2)
    p = 2 * mpmath.quad(dens, [abs(t), mpmath.inf])
    return t, float(p)


T_CASES = [
    ([0.76, 0.74, 0.79, 0.71, 0.77, 0.75, 0.78, 0.73, 0.80, 0.72],
     [0.70, 0.71, 0.69, 0.72, 0.68, 0.73, 0.70, 0.69, 0.71, 0.70]),
    ([0.51, 0.49, 0.50, 0.52, 0.48, 0.50, 0.51, 0.49, 0.50, 0.50],
     [0.50, 0.50, 0.51, 0.49, 0.50, 0.48, 0.52, 0.50, 0.49, 0.51]),
    ([0.9, 0.8, 0.85, 0.82, 0.88, 0.79, 0.91, 0.84, 0.86, 0.83],
     [0.6, 0.65, 0.62, 0.7, 0.61, 0.66, 0.63, 0.64, 0.69, 0.6]),
]


@pytest.mark.parametrize("a, b", T_CASES)
def test_t_and_p_match_numerical_integration(a, b):
    res = paired_t_test(a, b)
    t, p = oracle_t(a, b)
    assert res.t == pytest.approx(t, abs=1e-9)
    assert res.p == pytest.approx(p, abs=1e-9)
    assert res.df == 9
    assert res.significant == (res.p < 0.05)


def test_identical_samples():
    res = paired_t_test([0.1, 0.5, 0.7], [0.1, 0.5, 0.7])
    assert (res.t, res.p, res.significant) == (0.0, 1.0, False)


def test_constant_difference_is_significant():
    a = [0.8, 0.75, 0.7, 0.77, 0.73, 0.79, 0.71, 0.74, 0.76, 0.72]
    b = [x - 0.1 for x in a]
    res = paired_t_test(a, b)
    assert res.p == 0.0 and res.significant


def test_length_mismatch_rejected():
    with pytest.raises(EvaluationError):
        paired_t_test([1.0, 2.0], [1.0])


def test_corrected_variant_is_more_conservative():
    a, b = T_CASES[0]
    assert paired_t_test(a, b, corrected=True).p > paired_t_test(a, b).p


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.floats(0, 1), st.floats(0, 1)), min_size=2, max_size=12))
def test_t_test_symmetries(pairs):
    a, b = map(list, zip(*pairs))
    assert not paired_t_test(a, a).significant
    ab, ba = paired_t_test(a, b), paired_t_test(b, a)
    assert ab.t == -ba.t
    assert ab.p == ba.p
    assert 0.0 <= ab.p <= 1.0
