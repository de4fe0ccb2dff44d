#!/usr/bin/env python3
"""Timing comparison of the compiled and numpy kernel lanes.

Runs each hot evaluation kernel on representative input sizes through
both implementations and prints per-call timings plus the speedup.
Sizes marked "grid" mirror what a full benchmark run feeds the kernels;
"large" shows scaling headroom.

Usage:
    python benchmarks/bench_kernels.py [repeats]

Set MANISEARCH_NO_NUMBA=1 to verify the numpy lane is what the package
then uses; this script always times both lanes when numba is importable.
"""

import sys
import time

import numpy as np

from manisearch import kernels


def _time(fn, args, repeats):
    fn(*args)  # warm up (first call compiles on the jit lane)
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn(*args)
    return (time.perf_counter() - t0) / repeats


def _smooth_l1_inputs(shape, seed):
    rng = np.random.default_rng(seed)
    return (np.ascontiguousarray(rng.standard_normal(shape)), 1e-3)


def _masked_inputs(m, h, r, density, seed):
    rng = np.random.default_rng(seed)
    u = np.ascontiguousarray(rng.standard_normal((m, r)))
    s = np.ascontiguousarray(rng.uniform(0.5, 2.0, r))
    v = np.ascontiguousarray(rng.standard_normal((h, r)))
    mask = rng.random((m, h)) < density
    rows, cols = (i.astype(np.int64) for i in np.nonzero(mask))
    vals = np.ascontiguousarray(rng.standard_normal(rows.size))
    return (u, s, v, rows, cols, vals)


CASES = [
    ("smooth_l1 10x20 (grid)", kernels.smooth_l1_sum_numpy,
     kernels.smooth_l1_sum_jit, _smooth_l1_inputs((10, 20), 0)),
    ("smooth_l1 200x400 (large)", kernels.smooth_l1_sum_numpy,
     kernels.smooth_l1_sum_jit, _smooth_l1_inputs((200, 400), 1)),
    ("masked_sq 7x7 r2 (grid)", kernels.masked_residual_sq_numpy,
     kernels.masked_residual_sq_jit, _masked_inputs(7, 7, 2, 0.5, 2)),
    ("masked_sq 400x400 r3 (large)", kernels.masked_residual_sq_numpy,
     kernels.masked_residual_sq_jit, _masked_inputs(400, 400, 3, 0.5, 3)),
    ("masked_abs 7x7 r2 (grid)", kernels.masked_residual_abs_numpy,
     kernels.masked_residual_abs_jit, _masked_inputs(7, 7, 2, 0.5, 4)),
    ("masked_abs 400x400 r3 (large)", kernels.masked_residual_abs_numpy,
     kernels.masked_residual_abs_jit, _masked_inputs(400, 400, 3, 0.5, 5)),
]


def main() -> int:
    repeats = int(sys.argv[1]) if len(sys.argv) > 1 else 2000
    lane = "numba" if kernels.USING_NUMBA else "numpy (fallback)"
    print(f"active package lane: {lane}")
    if kernels.smooth_l1_sum_jit is None:
        print("numba unavailable or disabled; timing the numpy lane only\n")
    header = f"{'kernel':32s} {'numpy':>12s} {'numba':>12s} {'speedup':>8s}"
    print(header)
    print("-" * len(header))
    for name, np_fn, jit_fn, args in CASES:
        t_np = _time(np_fn, args, repeats)
        if jit_fn is not None:
            t_jit = _time(jit_fn, args, repeats)
            check = abs(np_fn(*args) - jit_fn(*args))
            assert check <= 1e-9 * (1 + abs(np_fn(*args))), f"lane mismatch on {name}"
            print(f"{name:32s} {t_np * 1e6:10.2f}us {t_jit * 1e6:10.2f}us "
                  f"{t_np / t_jit:7.1f}x")
        else:
            print(f"{name:32s} {t_np * 1e6:10.2f}us {'-':>12s} {'-':>8s}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
