"""Compiled tree induction and traversal.

A tree is a set of parallel node arrays. Node ``i`` is a leaf when
``feature[i] == -1``; otherwise rows with ``x[feature] <= threshold`` go to
``left[i]``, larger values to ``right[i]`` and sentinel values to the side
given by ``missing_left[i]``. ``good``/``bad`` hold training class counts for
every node, internal ones included (pruning needs them).
"""

import math

import numpy as np
from numba import njit

SENTINEL = -9999.0
# smallest information gain treated as positive
GAIN_EPS = 1e-12
# absorbs rounding when comparing a gain against the candidates' mean
AVG_GAIN_SLACK = 1e-12


@njit(cache=True, nogil=True)
def entropy2(a, b):
    n = a + b
    if a == 0 or b == 0:
        return 0.0
    pa = a / n
    pb = b / n
    return -(pa * math.log2(pa) + pb * math.log2(pb))


@njit(cache=True, nogil=True)
def _scan_feature(values, labels, n_node, min_leaf):
    """Highest-gain threshold on one feature (ties: lowest threshold).

    ``values``/``labels`` hold the node's rows with a known value; the gain
    is scaled by the known fraction of the node. Returns
    (gain, gain ratio, threshold) with gain -1 when no admissible split
    has positive gain.
    """
    m = values.shape[0]
    best_gain = -1.0
    best_ratio = 0.0
    best_thr = 0.0
    if m < 2 * min_leaf:
        return best_gain, best_ratio, best_thr
    order = np.argsort(values, kind="mergesort")
    total_good = 0
    for i in range(m):
        total_good += labels[i]
    total_bad = m - total_good
    base = entropy2(total_good, total_bad)
    known_frac = m / n_node
    left_good = 0
    for pos in range(m - 1):
        r = order[pos]
        left_good += labels[r]
        v = values[r]
        v_next = values[order[pos + 1]]
        if not v < v_next:
            continue
        n_left = pos + 1
        n_right = m - n_left
        if n_left < min_leaf or n_right < min_leaf:
            continue
        left_bad = n_left - left_good
        right_good = total_good - left_good
        right_bad = n_right - right_good
        cond = (n_left * entropy2(left_good, left_bad) + n_right * entropy2(right_good, right_bad)) / m
        gain = known_frac * (base - cond)
        if gain <= GAIN_EPS or gain <= best_gain:
            continue
        thr = v + (v_next - v) / 2.0
        if thr >= v_next or thr == SENTINEL:
            thr = v
        best_gain = gain
        best_ratio = gain / entropy2(n_left, n_right)
        best_thr = thr
    return best_gain, best_ratio, best_thr


@njit(cache=True, nogil=True)
def build_tree(X, y, rows, n_candidates, min_leaf, max_depth, randomize, rng):
    """Grow a tree top-down on ``X[rows]``.

    ``rows`` may repeat indices (bootstrap). With ``randomize`` each node
    looks at ``n_candidates`` features drawn without replacement from
    ``rng``; otherwise at all of them. Candidates are scanned in ascending
    feature index and replace the incumbent only when strictly better, so
    ties go to the lowest feature, then the lowest threshold.
    """
    n_features = X.shape[1]
    n = rows.shape[0]
    cap = 2 * n + 1
    feature = np.full(cap, -1, np.int32)
    threshold = np.zeros(cap, np.float64)
    left = np.full(cap, -1, np.int32)
    right = np.full(cap, -1, np.int32)
    missing_left = np.zeros(cap, np.bool_)
    good = np.zeros(cap, np.int64)
    bad = np.zeros(cap, np.int64)

    work = rows.copy()
    scratch = np.empty(n, np.int64)
    vals = np.empty(n, np.float64)
    labs = np.empty(n, np.int64)
    perm = np.arange(n_features)
    chosen = np.empty(n_features, np.int64)
    cand_gain = np.empty(n_features, np.float64)
    cand_ratio = np.empty(n_features, np.float64)
    cand_thr = np.empty(n_features, np.float64)

    # stack of (node, start, end, depth)
    stack = np.empty((cap, 4), np.int64)
    stack[0, 0] = 0
    stack[0, 1] = 0
    stack[0, 2] = n
    stack[0, 3] = 0
    top = 1
    n_nodes = 1
    while top > 0:
        top -= 1
        node = stack[top, 0]
        start = stack[top, 1]
        end = stack[top, 2]
        depth = stack[top, 3]
        size = end - start
        g = 0
        for i in range(start, end):
            g += y[work[i]]
        good[node] = g
        bad[node] = size - g
        if g == 0 or g == size or size < 2 * min_leaf:
            continue
        if max_depth >= 0 and depth >= max_depth:
            continue

        if randomize and n_candidates < n_features:
            for i in range(n_candidates):
                j = i + rng.integers(0, n_features - i)
                tmp = perm[i]
                perm[i] = perm[j]
                perm[j] = tmp
            n_chosen = n_candidates
            for i in range(n_chosen):
                chosen[i] = perm[i]
            chosen[:n_chosen].sort()
        else:
            n_chosen = n_features
            for i in range(n_features):
                chosen[i] = i

        # per feature: best threshold by gain; across features: best gain
        # ratio among candidates whose gain reaches the average gain
        n_valid = 0
        gain_sum = 0.0
        for c in range(n_chosen):
            f = chosen[c]
            m = 0
            for i in range(start, end):
                r = work[i]
                v = X[r, f]
                if v != SENTINEL:
                    vals[m] = v
                    labs[m] = y[r]
                    m += 1
            gain, ratio, thr = _scan_feature(vals[:m], labs[:m], size, min_leaf)
            cand_gain[c] = gain
            cand_ratio[c] = ratio
            cand_thr[c] = thr
            if gain > 0:
                n_valid += 1
                gain_sum += gain
        best_feat = -1
        best_thr = 0.0
        if n_valid > 0:
            floor = gain_sum / n_valid - AVG_GAIN_SLACK
            best_ratio = -1.0
            for c in range(n_chosen):
                if cand_gain[c] > 0 and cand_gain[c] >= floor and cand_ratio[c] > best_ratio:
                    best_ratio = cand_ratio[c]
                    best_feat = chosen[c]
                    best_thr = cand_thr[c]
        if best_feat < 0:
            continue

        n_known_left = 0
        n_known_right = 0
        for i in range(start, end):
            v = X[work[i], best_feat]
            if v != SENTINEL:
                if v <= best_thr:
                    n_known_left += 1
                else:
                    n_known_right += 1
        miss_left = n_known_left >= n_known_right
        # stable partition into [left | right]
        lo = start
        hi = 0
        for i in range(start, end):
            r = work[i]
            v = X[r, best_feat]
            if v == SENTINEL:
                go_left = miss_left
            else:
                go_left = v <= best_thr
            if go_left:
                work[lo] = r
                lo += 1
            else:
                scratch[hi] = r
                hi += 1
        for i in range(hi):
            work[lo + i] = scratch[i]

        feature[node] = best_feat
        threshold[node] = best_thr
        missing_left[node] = miss_left
        left_id = n_nodes
        right_id = n_nodes + 1
        n_nodes += 2
        left[node] = left_id
        right[node] = right_id
        # right pushed first so the left subtree is expanded first
        stack[top, 0] = right_id
        stack[top, 1] = lo
        stack[top, 2] = end
        stack[top, 3] = depth + 1
        top += 1
        stack[top, 0] = left_id
        stack[top, 1] = start
        stack[top, 2] = lo
        stack[top, 3] = depth + 1
        top += 1

    return (
        feature[:n_nodes].copy(), threshold[:n_nodes].copy(), left[:n_nodes].copy(),
        right[:n_nodes].copy(), missing_left[:n_nodes].copy(), good[:n_nodes].copy(),
        bad[:n_nodes].copy(),
    )


@njit(cache=True, nogil=True)
def leaf_index(feature, threshold, left, right, missing_left, X):
    out = np.empty(X.shape[0], np.int64)
    for r in range(X.shape[0]):
        node = 0
        while feature[node] >= 0:
            v = X[r, feature[node]]
            if v == SENTINEL:
                go_left = missing_left[node]
            else:
                go_left = v <= threshold[node]
            node = left[node] if go_left else right[node]
        out[r] = node
    return out
