# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Native kernels mirroring `fantasyxi.kernels.pure` operation for operation.

The splitmix64 stream, candidate order, tie rules, threshold arithmetic, and
stable partitions are identical to the pure backend. The extension must be
compiled with -ffp-contract=off so `lo + u*(hi-lo)` is not fused into an FMA,
which would change thresholds in the last ulp relative to the pure backend.
"""

import numpy as np

from libc.math cimport INFINITY, nextafter

BACKEND = "native"

ctypedef unsigned long long u64

cdef u64 GAMMA = 0x9E3779B97F4A7C15ULL
cdef u64 MIX1 = 0xBF58476D1CE4E5B9ULL
cdef u64 MIX2 = 0x94D049BB133111EBULL
cdef double INV_2_53 = 1.0 / 9007199254740992.0


cdef inline u64 mix64(u64 z) noexcept nogil:
    z = (z ^ (z >> 30)) * MIX1
    z = (z ^ (z >> 27)) * MIX2
    return z ^ (z >> 31)


cdef struct Rng:
    u64 state


cdef inline u64 rng_u64(Rng* r) noexcept nogil:
    r.state += GAMMA
    return mix64(r.state)


cdef inline double rng_double(Rng* r) noexcept nogil:
    return <double>(rng_u64(r) >> 11) * INV_2_53


cdef inline long rng_below(Rng* r, long n) noexcept nogil:
    cdef long v = <long>(rng_double(r) * n)
    if v >= n:
        v = n - 1
    return v


cdef inline double bounded_threshold(double lo, double hi, double u) noexcept nogil:
    cdef double t = lo + u * (hi - lo)
    if t >= hi:
        t = nextafter(hi, lo)
    return t


cdef void merge_sort(double* xs, double* yv, double* tx, double* ty, long m) noexcept nogil:
    # bottom-up stable mergesort of (xs, yv) by xs
    cdef long width = 1
    cdef long lo, mid, hi, i, j, k
    while width < m:
        lo = 0
        while lo < m:
            mid = lo + width
            if mid > m:
                mid = m
            hi = lo + 2 * width
            if hi > m:
                hi = m
            i = lo
            j = mid
            k = lo
            while i < mid and j < hi:
                if xs[i] <= xs[j]:
                    tx[k] = xs[i]
                    ty[k] = yv[i]
                    i += 1
                else:
                    tx[k] = xs[j]
                    ty[k] = yv[j]
                    j += 1
                k += 1
            while i < mid:
                tx[k] = xs[i]
                ty[k] = yv[i]
                i += 1
                k += 1
            while j < hi:
                tx[k] = xs[j]
                ty[k] = yv[j]
                j += 1
                k += 1
            lo = hi
        for i in range(m):
            xs[i] = tx[i]
            yv[i] = ty[i]
        width *= 2


def fit_tree(double[:, ::1] X, double[::1] y, u64 tree_seed, long max_features,
             long min_samples_leaf, bint bootstrap, bint exhaustive):
    cdef long n = X.shape[0]
    cdef long d = X.shape[1]
    cdef Rng rng
    rng.state = tree_seed

    idx_arr = np.empty(n, dtype=np.int64)
    cdef long long[::1] idx = idx_arr
    cdef long i
    if bootstrap:
        for i in range(n):
            idx[i] = rng_below(&rng, n)
    else:
        for i in range(n):
            idx[i] = i

    cdef long cap = 2 * n + 1
    feature_arr = np.empty(cap, dtype=np.int32)
    threshold_arr = np.empty(cap, dtype=np.float64)
    left_arr = np.empty(cap, dtype=np.int32)
    right_arr = np.empty(cap, dtype=np.int32)
    value_arr = np.empty(cap, dtype=np.float64)
    cdef int[::1] feature = feature_arr
    cdef double[::1] threshold = threshold_arr
    cdef int[::1] left = left_arr
    cdef int[::1] right = right_arr
    cdef double[::1] value = value_arr

    stack_arr = np.empty((cap + 2, 4), dtype=np.int64)
    cdef long long[:, ::1] stack = stack_arr
    cdef long top = 0
    stack[0, 0] = 0
    stack[0, 1] = n
    stack[0, 2] = -1
    stack[0, 3] = 0
    top = 1

    xs_arr = np.empty(n, dtype=np.float64)
    yv_arr = np.empty(n, dtype=np.float64)
    tx_arr = np.empty(n, dtype=np.float64)
    ty_arr = np.empty(n, dtype=np.float64)
    cum_arr = np.empty(n, dtype=np.float64)
    part_arr = np.empty(n, dtype=np.int64)
    perm_arr = np.empty(d, dtype=np.int64)
    cdef double[::1] xs = xs_arr
    cdef double[::1] yv = yv_arr
    cdef double[::1] tx = tx_arr
    cdef double[::1] ty = ty_arr
    cdef double[::1] cum = cum_arr
    cdef long long[::1] part = part_arr
    cdef long long[::1] perm = perm_arr

    cdef long n_nodes = 0
    cdef long lo, hi, parent, is_right, node, m, j, jj, row, f, r, tried
    cdef long n_left, n_right, best_f, pos, start, stop
    cdef double stot, ymin, ymax, yval, fmin, fmax, xval, u, t, s_left, s_right
    cdef double score, best_score, best_t, total, sc, tt
    cdef long tmp

    while top > 0:
        top -= 1
        lo = stack[top, 0]
        hi = stack[top, 1]
        parent = stack[top, 2]
        is_right = stack[top, 3]
        node = n_nodes
        n_nodes += 1
        if parent >= 0:
            if is_right:
                right[parent] = <int>node
            else:
                left[parent] = <int>node
        m = hi - lo
        stot = 0.0
        ymin = INFINITY
        ymax = -INFINITY
        for jj in range(lo, hi):
            yval = y[idx[jj]]
            stot += yval
            if yval < ymin:
                ymin = yval
            if yval > ymax:
                ymax = yval
        if m < 2 * min_samples_leaf or ymin == ymax:
            feature[node] = -1
            threshold[node] = 0.0
            left[node] = -1
            right[node] = -1
            value[node] = stot / m
            continue

        best_score = -INFINITY
        best_f = -1
        best_t = 0.0
        for j in range(d):
            perm[j] = j
        tried = 0
        for j in range(d):
            r = rng_below(&rng, d - j)
            tmp = perm[j]
            perm[j] = perm[j + r]
            perm[j + r] = tmp
            f = perm[j]
            fmin = INFINITY
            fmax = -INFINITY
            for jj in range(lo, hi):
                xval = X[idx[jj], f]
                if xval < fmin:
                    fmin = xval
                if xval > fmax:
                    fmax = xval
            if fmin == fmax:
                continue
            if exhaustive:
                for jj in range(m):
                    row = idx[lo + jj]
                    xs[jj] = X[row, f]
                    yv[jj] = y[row]
                merge_sort(&xs[0], &yv[0], &tx[0], &ty[0], m)
                cum[0] = yv[0]
                for jj in range(1, m):
                    cum[jj] = cum[jj - 1] + yv[jj]
                total = cum[m - 1]
                score = -INFINITY
                t = 0.0
                start = min_samples_leaf - 1
                stop = m - min_samples_leaf
                for pos in range(start, stop):
                    if xs[pos] == xs[pos + 1]:
                        continue
                    n_left = pos + 1
                    n_right = m - n_left
                    s_left = cum[pos]
                    s_right = total - s_left
                    sc = s_left * s_left / n_left + s_right * s_right / n_right
                    if sc > score:
                        tt = (xs[pos] + xs[pos + 1]) * 0.5
                        if tt >= xs[pos + 1]:
                            tt = xs[pos]
                        score = sc
                        t = tt
            else:
                u = rng_double(&rng)
                t = bounded_threshold(fmin, fmax, u)
                n_left = 0
                s_left = 0.0
                for jj in range(lo, hi):
                    row = idx[jj]
                    if X[row, f] <= t:
                        n_left += 1
                        s_left += y[row]
                n_right = m - n_left
                if n_left < min_samples_leaf or n_right < min_samples_leaf:
                    score = -INFINITY
                else:
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
            feature[node] = -1
            threshold[node] = 0.0
            left[node] = -1
            right[node] = -1
            value[node] = stot / m
            continue

        n_left = 0
        for jj in range(lo, hi):
            row = idx[jj]
            if X[row, best_f] <= best_t:
                part[n_left] = row
                n_left += 1
        n_right = n_left
        for jj in range(lo, hi):
            row = idx[jj]
            if not (X[row, best_f] <= best_t):
                part[n_right] = row
                n_right += 1
        for jj in range(m):
            idx[lo + jj] = part[jj]

        feature[node] = <int>best_f
        threshold[node] = best_t
        left[node] = -1
        right[node] = -1
        value[node] = 0.0
        stack[top, 0] = lo + n_left
        stack[top, 1] = hi
        stack[top, 2] = node
        stack[top, 3] = 1
        top += 1
        stack[top, 0] = lo
        stack[top, 1] = lo + n_left
        stack[top, 2] = node
        stack[top, 3] = 0
        top += 1

    return (feature_arr[:n_nodes].copy(), threshold_arr[:n_nodes].copy(),
            left_arr[:n_nodes].copy(), right_arr[:n_nodes].copy(),
            value_arr[:n_nodes].copy())


def predict_tree(int[::1] feature, double[::1] threshold, int[::1] left,
                 int[::1] right, double[::1] value, double[:, ::1] X):
    cdef long n = X.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef long r
    cdef int node
    for r in range(n):
        node = 0
        while feature[node] >= 0:
            if X[r, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[r] = value[node]
    return out_arr


def knapsack_layers(long long[::1] wt2, double[::1] points, signed char[::1] team,
                    long budget2, long slots, long cap0, long cap1):
    cdef long n = wt2.shape[0]
    g_arr = np.full((n + 1, budget2 + 1, slots + 1, cap0 + 1), -np.inf,
                    dtype=np.float64)
    cdef double[:, :, :, ::1] g = g_arr
    cdef long i, w, k, a
    cdef long wt
    cdef double p, best, v
    cdef signed char tm
    for w in range(budget2 + 1):
        for a in range(cap0 + 1):
            g[n, w, 0, a] = 0.0
    for i in range(n - 1, -1, -1):
        wt = <long>wt2[i]
        p = points[i]
        tm = team[i]
        for w in range(budget2 + 1):
            for k in range(slots + 1):
                for a in range(cap0 + 1):
                    best = g[i + 1, w, k, a]
                    if k >= 1 and wt <= w:
                        if tm == 0:
                            if a >= 1:
                                v = p + g[i + 1, w - wt, k - 1, a - 1]
                                if v > best:
                                    best = v
                        else:
                            if cap1 - (slots - k) + (cap0 - a) >= 1:
                                v = p + g[i + 1, w - wt, k - 1, a]
                                if v > best:
                                    best = v
                    g[i, w, k, a] = best
    return g_arr
