"""Numeric hot paths: windowed score sums, state-run extraction, box IOU
matrices and greedy one-to-one matching.

Every kernel exists twice: a numba ``@njit`` version and a pure-numpy
fallback. Both produce bit-identical results; the public wrappers pick one
at import time. Set ``HOISEG_BACKEND=numpy`` to force the fallback (useful
for debugging or on platforms without a working numba). The benchmark in
``benchmarks/bench_kernels.py`` compares the two paths.
"""

import os

import numpy as np

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised only without numba
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        def decorate(func):
            return func

        if len(args) == 1 and callable(args[0]):
            return args[0]
        return decorate


USE_NUMBA = NUMBA_AVAILABLE and os.environ.get("HOISEG_BACKEND", "").lower() != "numpy"


# ---------------------------------------------------------------------------
# Sliding-window sums
# ---------------------------------------------------------------------------

@njit(cache=True)
def _window_sums_numba(scores, window):
    n = scores.shape[0]
    out = np.empty(n, dtype=np.int64)
    acc = 0
    for t in range(n):
        acc += scores[t]
        if t >= window:
            acc -= scores[t - window]
        out[t] = acc
    return out


def _window_sums_numpy(scores, window):
    n = scores.shape[0]
    csum = np.concatenate((np.zeros(1, dtype=np.int64), np.cumsum(scores, dtype=np.int64)))
    lo = np.maximum(np.arange(n, dtype=np.int64) + 1 - window, 0)
    return csum[1:] - csum[lo]


def window_sums(scores, window):
    """Sum of ``scores[max(0, t-window+1) .. t]`` for every frame t.

    Windows at the start of the sequence are truncated to the available
    frames. ``scores`` is any integer-like 1-d array, ``window`` >= 1.
    """
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    scores = np.ascontiguousarray(scores, dtype=np.int64)
    if USE_NUMBA:
        return _window_sums_numba(scores, window)
    return _window_sums_numpy(scores, window)


# ---------------------------------------------------------------------------
# Run extraction (maximal runs of True)
# ---------------------------------------------------------------------------

@njit(cache=True)
def _run_bounds_numba(active):
    n = active.shape[0]
    max_runs = n // 2 + 1
    starts = np.empty(max_runs, dtype=np.int64)
    ends = np.empty(max_runs, dtype=np.int64)
    count = 0
    inside = False
    for t in range(n):
        if active[t] and not inside:
            starts[count] = t
            inside = True
        elif not active[t] and inside:
            ends[count] = t - 1
            count += 1
            inside = False
    if inside:
        ends[count] = n - 1
        count += 1
    return starts[:count], ends[:count]


def _run_bounds_numpy(active):
    a = active.astype(np.int8)
    edges = np.diff(np.concatenate((np.zeros(1, dtype=np.int8), a, np.zeros(1, dtype=np.int8))))
    starts = np.flatnonzero(edges == 1).astype(np.int64)
    ends = (np.flatnonzero(edges == -1) - 1).astype(np.int64)
    return starts, ends


def run_bounds(active):
    """Inclusive (starts, ends) of every maximal run of True in a bool array."""
    active = np.ascontiguousarray(active, dtype=np.bool_)
    if USE_NUMBA:
        return _run_bounds_numba(active)
    return _run_bounds_numpy(active)


# ---------------------------------------------------------------------------
# Box IOU matrices
# ---------------------------------------------------------------------------

@njit(cache=True)
def _box_iou_matrix_numba(a, b):
    n = a.shape[0]
    m = b.shape[0]
    out = np.zeros((n, m), dtype=np.float64)
    for i in range(n):
        ax0, ay0, ax1, ay1 = a[i, 0], a[i, 1], a[i, 2], a[i, 3]
        area_a = (ax1 - ax0) * (ay1 - ay0)
        for j in range(m):
            iw = min(ax1, b[j, 2]) - max(ax0, b[j, 0])
            if iw <= 0.0:
                continue
            ih = min(ay1, b[j, 3]) - max(ay0, b[j, 1])
            if ih <= 0.0:
                continue
            inter = iw * ih
            area_b = (b[j, 2] - b[j, 0]) * (b[j, 3] - b[j, 1])
            out[i, j] = inter / (area_a + area_b - inter)
    return out


def _box_iou_matrix_numpy(a, b):
    iw = np.minimum(a[:, None, 2], b[None, :, 2]) - np.maximum(a[:, None, 0], b[None, :, 0])
    ih = np.minimum(a[:, None, 3], b[None, :, 3]) - np.maximum(a[:, None, 1], b[None, :, 1])
    inter = np.where((iw > 0.0) & (ih > 0.0), iw * ih, 0.0)
    area_a = (a[:, 2] - a[:, 0]) * (a[:, 3] - a[:, 1])
    area_b = (b[:, 2] - b[:, 0]) * (b[:, 3] - b[:, 1])
    union = area_a[:, None] + area_b[None, :] - inter
    out = np.zeros_like(inter)
    np.divide(inter, union, out=out, where=inter > 0.0)
    return out

def box_iou_matrix(a, b):
    """Pairwise IOU between two (N, 4) / (M, 4) arrays of x0,y0,x1,y1 boxes."""
    a = np.ascontiguousarray(a, dtype=np.float64).reshape(-1, 4)
    b = np.ascontiguousarray(b, dtype=np.float64).reshape(-1, 4)
    if USE_NUMBA:
        return _box_iou_matrix_numba(a, b)
    return _box_iou_matrix_numpy(a, b)


# ---------------------------------------------------------------------------
# Greedy one-to-one matching
# ---------------------------------------------------------------------------

@njit(cache=True)
def _greedy_match_ordered_numba(overlap, min_overlap):
    n, m = overlap.shape
    assigned = np.full(n, -1, dtype=np.int64)
    taken = np.zeros(m, dtype=np.bool_)
    for i in range(n):
        best = -1
        best_val = -1.0
        for j in range(m):
            if taken[j]:
                continue
            if overlap[i, j] > best_val:
                best_val = overlap[i, j]
                best = j
        if best >= 0 and best_val >= min_overlap:
            assigned[i] = best
            taken[best] = True
    return assigned


def _greedy_match_ordered_numpy(overlap, min_overlap):
    n, m = overlap.shape
    assigned = np.full(n, -1, dtype=np.int64)
    taken = np.zeros(m, dtype=bool)
    for i in range(n):
        if taken.all():
            break
        row = np.where(taken, -1.0, overlap[i])
        best = int(np.argmax(row)) if m else -1
        if best >= 0 and row[best] >= min_overlap:
            assigned[i] = best
            taken[best] = True
    return assigned


def greedy_match_ordered(overlap, min_overlap):
    """Row-by-row greedy matching: each row (in order) claims the free column
    with the highest overlap, and the claim sticks only when that overlap is
    >= ``min_overlap``. Returns the claimed column per row, -1 for none.
    """
    overlap = np.ascontiguousarray(overlap, dtype=np.float64)
    if USE_NUMBA:
        return _greedy_match_ordered_numba(overlap, float(min_overlap))
    return _greedy_match_ordered_numpy(overlap, float(min_overlap))


@njit(cache=True)
def _greedy_match_global_numba(overlap, min_overlap):
    n, m = overlap.shape
    assigned = np.full(n, -1, dtype=np.int64)
    row_free = np.ones(n, dtype=np.bool_)
    col_free = np.ones(m, dtype=np.bool_)
    for _ in range(min(n, m)):
        best_val = -1.0
        best_i = -1
        best_j = -1
        for i in range(n):
            if not row_free[i]:
                continue
            for j in range(m):
                if not col_free[j]:
                    continue
                if overlap[i, j] > best_val:
                    best_val = overlap[i, j]
                    best_i = i
                    best_j = j
        if best_i < 0 or best_val < min_overlap:
            break
        assigned[best_i] = best_j
        row_free[best_i] = False
        col_free[best_j] = False
    return assigned


def _greedy_match_global_numpy(overlap, min_overlap):
    n, m = overlap.shape
    assigned = np.full(n, -1, dtype=np.int64)
    if n == 0 or m == 0:
        return assigned
    work = overlap.copy()
    for _ in range(min(n, m)):
        flat = int(np.argmax(work))
        i, j = divmod(flat, m)
        if work[i, j] < min_overlap:
            break
        assigned[i] = j
        work[i, :] = -1.0
        work[:, j] = -1.0
    return assigned


def greedy_match_global(overlap, min_overlap):
    """Globally greedy matching: repeatedly claim the highest remaining
    overlap >= ``min_overlap`` among free rows/columns. Ties resolve to the
    smallest row-major index. Returns the claimed column per row, -1 for none.
    """
    overlap = np.ascontiguousarray(overlap, dtype=np.float64)
    if USE_NUMBA:
        return _greedy_match_global_numba(overlap, float(min_overlap))
    return _greedy_match_global_numpy(overlap, float(min_overlap))
