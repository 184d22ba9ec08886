"""Compare the numba kernels against the pure-numpy fallback.

Run:  python3 benchmarks/bench_kernels.py
"""
import time

import numpy as np

from bernlab import _kernels


def bench(fn, *args, repeats=7):
    fn(*args)  # warm up (numba compilation)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    rng = np.random.default_rng(0)
    print(f"selected path: {'numba' if _kernels.USING_NUMBA else 'numpy'} "
          "(set BERNLAB_NO_NUMBA=1 to force numpy)\n")

    print(f"{'kernel':<22}{'size':>12}{'numpy':>12}{'selected':>12}{'speedup':>10}")
    for J in (10_000, 1_000_000, 10_000_000):
        k = max(J // 100, 1)
        a = rng.random(J + k) + 0.01
        t_np = bench(_kernels.zseq_norm_head_numpy, a, k, J)
        t_sel = bench(_kernels.zseq_norm_head, a, k, J)
        print(f"{'zseq_norm_head':<22}{J:>12,}{t_np * 1e3:>10.2f}ms"
              f"{t_sel * 1e3:>10.2f}ms{t_np / t_sel:>9.1f}x")

    for n in (10_000, 1_000_000):
        u = rng.standard_normal(n)
        s = rng.standard_normal(n) * 0.1
        L = rng.integers(1, 64, size=n)
        t_np = bench(_kernels.segment_square_sum_numpy, u, s, L)
        t_sel = bench(_kernels.segment_square_sum, u, s, L)
        print(f"{'segment_square_sum':<22}{n:>12,}{t_np * 1e3:>10.2f}ms"
              f"{t_sel * 1e3:>10.2f}ms{t_np / t_sel:>9.1f}x")


if __name__ == "__main__":
    main()
