"""Compare the compiled and pure-numpy builds of the hot kernels.

Runs both implementations in one process on identical inputs, checks
they agree bit for bit, and prints wall-clock timings.  Usage:

    python3 benchmarks/bench_kernels.py [--sizes 64 256 1024] [--batch 512] [--reps 50]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from duonet import _kernels


def _timed(fn, reps: int) -> float:
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_fft(numba_impl, sizes, batch: int, reps: int) -> None:
    rng = np.random.default_rng(0)
    print(f"{'fft n':>8} {'numpy (ms)':>12} {'numba (ms)':>12} {'speedup':>8}")
    for n in sizes:
        rev, tw = _kernels.fft_tables(n)
        base = rng.normal(size=(batch, n)) + 1j * rng.normal(size=(batch, n))

        def run(impl):
            buf = base.copy()
            impl(buf, rev, tw)
            return buf

        out_np = run(_kernels.fft_inplace_numpy)
        t_np = _timed(lambda: run(_kernels.fft_inplace_numpy), reps)
        if numba_impl is None:
            print(f"{n:>8} {1e3 * t_np:>12.3f} {'-':>12} {'-':>8}")
            continue
        out_nb = run(numba_impl)
        assert np.array_equal(out_np, out_nb), f"fft backends disagree at n={n}"
        t_nb = _timed(lambda: run(numba_impl), reps)
        print(f"{n:>8} {1e3 * t_np:>12.3f} {1e3 * t_nb:>12.3f} {t_np / t_nb:>8.2f}")


def bench_adam(numba_impl, sizes, reps: int) -> None:
    rng = np.random.default_rng(1)
    print(f"{'adam n':>8} {'numpy (ms)':>12} {'numba (ms)':>12} {'speedup':>8}")
    for n in sizes:
        p0 = rng.normal(size=n)
        g = rng.normal(size=n)

        def run(impl):
            p = p0.copy()
            m = np.zeros(n)
            v = np.zeros(n)
            for t in range(1, 101):
                impl(p, g, m, v, 1e-3, 0.9, 0.999, 1e-8, 1 - 0.9**t, 1 - 0.999**t)
            return p

        out_np = run(_kernels.adam_update_numpy)
        t_np = _timed(lambda: run(_kernels.adam_update_numpy), reps)
        if numba_impl is None:
            print(f"{n:>8} {1e3 * t_np:>12.3f} {'-':>12} {'-':>8}")
            continue
        out_nb = run(numba_impl)
        assert np.array_equal(out_np, out_nb), f"adam backends disagree at n={n}"
        t_nb = _timed(lambda: run(numba_impl), reps)
        print(f"{n:>8} {1e3 * t_np:>12.3f} {1e3 * t_nb:>12.3f} {t_np / t_nb:>8.2f}")


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", nargs="+", type=int, default=[64, 256, 1024])
    ap.add_argument("--batch", type=int, default=512)
    ap.add_argument("--reps", type=int, default=20)
    args = ap.parse_args()
    for n in args.sizes:
        if n & (n - 1) or n < 2:
            ap.error(f"sizes must be powers of two >= 2, got {n}")

    try:
        fft_nb, adam_nb = _kernels._make_numba_kernels()
        # trigger compilation outside the timed region
        rev, tw = _kernels.fft_tables(args.sizes[0])
        warm = np.zeros((2, args.sizes[0]), dtype=np.complex128)
        fft_nb(warm, rev, tw)
        adam_nb(np.zeros(4), np.zeros(4), np.zeros(4), np.zeros(4),
                1e-3, 0.9, 0.999, 1e-8, 0.1, 0.001)
    except ImportError:
        fft_nb = adam_nb = None
        print("numba unavailable; timing the numpy path only")

    print(f"active training backend: {_kernels.active_backend()}")
    bench_fft(fft_nb, args.sizes, args.batch, args.reps)
    print()
    bench_adam(adam_nb, [s * s // 4 for s in args.sizes], args.reps)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
