"""Pure-Python/numpy kernels: tree fitting, tree traversal, roster DP.

This module defines the reference semantics; the native extension mirrors it
operation for operation, including the splitmix64 draw sequence, tie-breaking
by first candidate, and stable partitions. Both backends produce identical
trees whenever targets are integer-valued (sums are then exact in float64
regardless of accumulation order); the regression targets produced by the
shipped rubric are integer-valued.
"""

from __future__ import annotations

import numpy as np

from ..rng import Rng, bounded_threshold

BACKEND = "pure"


# -- tree fitting --------------------------------------------------------------

def fit_tree(X: np.ndarray, y: np.ndarray, tree_seed: int, max_features: int,
             min_samples_leaf: int, bootstrap: bool, exhaustive: bool):
    """Grow one regression tree.

    exhaustive=False draws one uniform threshold per candidate feature
    (extremely randomized); exhaustive=True scans every midpoint between
    distinct sorted values (classic CART). Candidate features are drawn
    without replacement; constant features cost no threshold draw; if the
    first max_features non-constant candidates admit no valid split the scan
    continues through the remaining features.

    Returns (feature, threshold, left, right, value) arrays; feature == -1
    marks a leaf.
    """
    n, d = X.shape
    rng = Rng(tree_seed)
    if bootstrap:
        idx = np.array([rng.randbelow(n) for _ in range(n)], dtype=np.int64)
    else:
        idx = np.arange(n, dtype=np.int64)

    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    value: list[float] = []

    stack = [(0, n, -1, False)]  # lo, hi, parent, is_right_child
    while stack:
        lo, hi, parent, is_right = stack.pop()
        node = len(feature)
        if parent >= 0:
            if is_right:
                right[parent] = node
            else:
                left[parent] = node
        seg = idx[lo:hi]
        ys = y[seg]
        m = hi - lo
        stot = float(ys.sum())
        ymin = float(ys.min())
        ymax = float(ys.max())
        if m < 2 * min_samples_leaf or ymin == ymax:
            feature.append(-1)
            threshold.append(0.0)
            left.append(-1)
            right.append(-1)
            value.append(stot / m)
            continue

        best_score = -np.inf
        best_f = -1
        best_t = 0.0
        perm = list(range(d))
        tried = 0
        for j in range(d):
            r = rng.randbelow(d - j)
            perm[j], perm[j + r] = perm[j + r], perm[j]
            f = perm[j]
            col = X[seg, f]
            fmin = float(col.min())
            fmax = float(col.max())
            if fmin == fmax:
                continue
            if exhaustive:
                score, t = _best_midpoint_split(col, ys, stot, m, min_samples_leaf)
            else:
                u = rng.next_double()
                t = bounded_threshold(fmin, fmax, u)
                mask = col <= t
                n_left = int(mask.sum())
                n_right = m - n_left
                if n_left < min_samples_leaf or n_right < min_samples_leaf:
                    score = -np.inf
                else:
                    s_left = float(ys[mask].sum())
                    s_right = stot - s_left
                    score = s_left * s_left / n_left + s_right * s_right / n_right
            tried += 1
            if score > best_score:
                best_score = score
                best_f = f
                best_t = t
            if tried >= max_features and best_f >= 0:
                break

        if best_f < 0:
            feature.append(-1)
            threshold.append(0.0)
            left.append(-1)
            right.append(-1)
            value.append(stot / m)
            continue

        col = X[seg, best_f]
        mask = col <= best_t
        n_left = int(mask.sum())
        left_rows = seg[mask]   # materialize both before writing: seg is a
        right_rows = seg[~mask]  # view into idx
        idx[lo:lo + n_left] = left_rows      # stable partition
        idx[lo + n_left:hi] = right_rows
        feature.append(best_f)
        threshold.append(best_t)
        left.append(-1)
        right.append(-1)
        value.append(0.0)
        stack.append((lo + n_left, hi, node, True))
        stack.append((lo, lo + n_left, node, False))

    return (np.array(feature, dtype=np.int32),
            np.array(threshold, dtype=np.float64),
            np.array(left, dtype=np.int32),
            np.array(right, dtype=np.int32),
            np.array(value, dtype=np.float64))


def _best_midpoint_split(col, ys, stot, m, min_samples_leaf):
    """Best variance-reducing split between distinct sorted values; ties keep
    the earliest position. Returns (-inf, 0.0) when no position is valid."""
    order = np.argsort(col, kind="stable")
    xs = col[order]
    ycum = np.cumsum(ys[order])
    total = ycum[m - 1]
    best_score = -np.inf
    best_t = 0.0
    start = min_samples_leaf - 1
    stop = m - min_samples_leaf  # exclusive split position upper bound
    for i in range(start, stop):
        if xs[i] == xs[i + 1]:
            continue
        n_left = i + 1
        n_right = m - n_left
        s_left = ycum[i]
        s_right = total - s_left
        score = s_left * s_left / n_left + s_right * s_right / n_right
        if score > best_score:
            t = (xs[i] + xs[i + 1]) * 0.5
            if t >= xs[i + 1]:
                t = xs[i]
            best_score = score
            best_t = float(t)
    return best_score, best_t


# -- tree traversal ------------------------------------------------------------

def predict_tree(feature, threshold, left, right, value, X) -> np.ndarray:
    n = X.shape[0]
    node = np.zeros(n, dtype=np.int32)
    while True:
        f = feature[node]
        alive = np.nonzero(f >= 0)[0]
        if alive.size == 0:
            break
        cur = node[alive]
        goes_left = X[alive, f[alive]] <= threshold[cur]
        node[alive] = np.where(goes_left, left[cur], right[cur])
    return value[node]


# -- roster selection DP -------------------------------------------------------

def knapsack_layers(wt2, points, team, budget2: int, slots: int,
                    cap0: int, cap1: int) -> np.ndarray:
    """Suffix-value table for the exact roster problem.

    g[i, w, k, a] = best points achievable from cards i.. using exactly k more
    slots, at most w half-credits, at most a further team-0 picks, and at most
    b further team-1 picks where b is implied by (k, a) and the global totals.
    -inf marks infeasible states. The caller reconstructs the selection.
    """
    n = len(wt2)
    g = np.full((n + 1, budget2 + 1, slots + 1, cap0 + 1), -np.inf, dtype=np.float64)
    g[n, :, 0, :] = 0.0
    # remaining team-1 allowance at state (k, a): cap1 - picked1 where
    # picked1 = (slots - k) - (cap0 - a)
    k_grid = np.arange(slots + 1)[:, None]
    a_grid = np.arange(cap0 + 1)[None, :]
    b_grid = cap1 - (slots - k_grid) + (cap0 - a_grid)
    for i in range(n - 1, -1, -1):
        w = int(wt2[i])
        p = float(points[i])
        prev = g[i + 1]
        cur = prev.copy()
        if w <= budget2:
            take = np.full_like(prev, -np.inf)
            if team[i] == 0:
                take[w:, 1:, 1:] = p + prev[:budget2 + 1 - w, :slots, :cap0]
            else:
                allowed = b_grid >= 1  # (slots+1, cap0+1) over the pre-take state
                shifted = np.full_like(prev, -np.inf)
                shifted[w:, 1:, :] = p + prev[:budget2 + 1 - w, :slots, :]
                take = np.where(allowed[None, :, :], shifted, -np.inf)
            np.maximum(cur, take, out=cur)
        g[i] = cur
    return g
