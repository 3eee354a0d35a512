"""Benchmark the numba kernels against their pure-numpy fallbacks.

Run with:

    python benchmarks/bench_kernels.py

Both code paths are called directly (the HOISEG_BACKEND env flag is not
needed here), numba is warmed up before timing, and both paths are checked
for identical results on every workload.
"""

import time

import numpy as np

from hoiseg import kernels


def _time(fn, *args, repeats=5):
    best = float("inf")
    result = None
    for _ in range(repeats):
        start = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - start)
    return best, result


def _report(name, numpy_time, numba_time):
    if numba_time is None:
        print(f"{name:<28} numpy {numpy_time * 1e3:8.2f} ms   numba unavailable")
    else:
        speedup = numpy_time / numba_time if numba_time > 0 else float("inf")
        print(
            f"{name:<28} numpy {numpy_time * 1e3:8.2f} ms   "
            f"numba {numba_time * 1e3:8.2f} ms   x{speedup:.1f}"
        )


def bench_window_sums(rng):
    scores = (rng.random(5_000_000) < 0.4).astype(np.int64)
    window = 10
    if kernels.NUMBA_AVAILABLE:
        kernels._window_sums_numba(scores[:100], window)  # compile
        t_nb, r_nb = _time(kernels._window_sums_numba, scores, window)
    else:
        t_nb = r_nb = None
    t_np, r_np = _time(kernels._window_sums_numpy, scores, window)
    if r_nb is not None:
        assert np.array_equal(r_np, r_nb)
    _report("window_sums (5M frames)", t_np, t_nb)


def bench_run_bounds(rng):
    active = rng.random(5_000_000) < 0.5
    if kernels.NUMBA_AVAILABLE:
        kernels._run_bounds_numba(active[:100])
        t_nb, r_nb = _time(kernels._run_bounds_numba, active)
    else:
        t_nb = r_nb = None
    t_np, r_np = _time(kernels._run_bounds_numpy, active)
    if r_nb is not None:
        assert np.array_equal(r_np[0], r_nb[0]) and np.array_equal(r_np[1], r_nb[1])
    _report("run_bounds (5M frames)", t_np, t_nb)


def _random_boxes(rng, n):
    x0 = rng.random(n) * 500
    y0 = rng.random(n) * 500
    w = rng.random(n) * 100 + 1
    h = rng.random(n) * 100 + 1
    return np.stack([x0, y0, x0 + w, y0 + h], axis=1)


def bench_box_iou(rng):
    a = _random_boxes(rng, 800)
    b = _random_boxes(rng, 800)
    if kernels.NUMBA_AVAILABLE:
        kernels._box_iou_matrix_numba(a[:4], b[:4])
        t_nb, r_nb = _time(kernels._box_iou_matrix_numba, a, b)
    else:
        t_nb = r_nb = None
    t_np, r_np = _time(kernels._box_iou_matrix_numpy, a, b)
    if r_nb is not None:
        assert np.array_equal(r_np, r_nb)
    _report("box_iou_matrix (800x800)", t_np, t_nb)


def bench_greedy_match(rng):
    overlap = rng.random((600, 600))
    if kernels.NUMBA_AVAILABLE:
        kernels._greedy_match_global_numba(overlap[:4, :4], 0.5)
        t_nb, r_nb = _time(kernels._greedy_match_global_numba, overlap, 0.5)
    else:
        t_nb = r_nb = None
    t_np, r_np = _time(kernels._greedy_match_global_numpy, overlap, 0.5)
    if r_nb is not None:
        assert np.array_equal(r_np, r_nb)
    _report("greedy_match_global (600^2)", t_np, t_nb)

    if kernels.NUMBA_AVAILABLE:
        kernels._greedy_match_ordered_numba(overlap[:4, :4], 0.5)
        t_nb, r_nb = _time(kernels._greedy_match_ordered_numba, overlap, 0.5)
    else:
        t_nb = r_nb = None
    t_np, r_np = _time(kernels._greedy_match_ordered_numpy, overlap, 0.5)
    if r_nb is not None:
        assert np.array_equal(r_np, r_nb)
    _report("greedy_match_ordered (600^2)", t_np, t_nb)


def main():
    rng = np.random.default_rng(7)
    print(f"numba available: {kernels.NUMBA_AVAILABLE}")
    print(f"active backend:  {'numba' if kernels.USE_NUMBA else 'numpy'}")
    print()
    bench_window_sums(rng)
    bench_run_bounds(rng)
    bench_box_iou(rng)
    bench_greedy_match(rng)


if __name__ == "__main__":
    main()
