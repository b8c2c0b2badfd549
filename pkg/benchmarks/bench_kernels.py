"""Benchmark the trial kernels: numba-compiled loops vs the pure-numpy path.

Run from the repository root:

    python3 benchmarks/bench_kernels.py --trials 2000000 --repeats 5

Both paths are also checked for bit-identical outputs on the benchmark
inputs; a disagreement fails the run.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from moebius_bell import kernels


def _draws(n: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    return (
        rng.integers(0, 8, n).astype(np.uint8),
        rng.integers(0, 2, n).astype(np.uint8),
        rng.integers(0, 2, n).astype(np.uint8),
        rng.random(n),
    )


def _time(fn, args, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=2_000_000)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    draws = _draws(args.trials)
    kernel_args = {
        "standard": (*draws, 0.7, 0.4),
        "nonlocal": (*draws, 0.7, 0.4),
        "fatigue": (*draws, 0.2, 50.0),
    }

    have_numba = kernels.BACKEND == "numba"
    if not have_numba:
        print(f"{kernels.ENV_FLAG} disabled numba (backend: {kernels.BACKEND}); timing numpy only")

    print(f"n = {args.trials}, best of {args.repeats}")
    print(f"{'kernel':<10} {'numpy':>12} {'numba':>12} {'speedup':>9}")
    for name, kargs in kernel_args.items():
        numpy_fn = kernels.numpy_impls[name]
        t_numpy = _time(numpy_fn, kargs, args.repeats)
        line = f"{name:<10} {t_numpy * 1e3:>10.2f}ms"
        if have_numba:
            loop_fn = kernels.loop_impls[name]
            loop_fn(*kargs)  # compile outside the timing
            t_loop = _time(loop_fn, kargs, args.repeats)
            line += f" {t_loop * 1e3:>10.2f}ms {t_numpy / t_loop:>8.1f}x"
            out_a = numpy_fn(*kargs)
            out_b = loop_fn(*kargs)
            if not all(np.array_equal(a, b) for a, b in zip(out_a, out_b)):
                print(f"MISMATCH in kernel {name}")
                return 1
        else:
            line += f" {'-':>12} {'-':>9}"
        print(line)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
