"""Benchmark the compiled kernels against the pure-NumPy fallback.

Run from the repository root:

    python3 benchmarks/bench_kernels.py [--repeat 5]

Covers the two hot paths: factor counting over long symbol arrays (several
block lengths and alphabet sizes) and orbit coding for interval and
parallelogram cells.  Results are printed as a table with the speedup of
the compiled extension over the pure implementation.
"""

import argparse
import time

import numpy as np

from torusword import _kernels_py as pure
from torusword.substitution import fixed_point, k_bonacci
from torusword.torus import hexagon_example, hexagon_interior_point

try:
    from torusword import _speedups as compiled
except ImportError:
    compiled = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    fib = fixed_point(k_bonacci(2)).prefix(2**21)
    rng = np.random.default_rng(0)
    wide = rng.integers(0, 100, 2**20).astype(np.uint8)

    for n in (2, 8, 24):
        yield (
            f"count_factors fib n={n} L=2^21",
            lambda mod, n=n: mod.count_factors(fib, n, 2),
        )
    # alphabet 100 at n=12 exceeds the packed-key budget -> bytes-keyed path
    for n in (4, 12):
        yield (
            f"count_factors wide n={n} L=2^20",
            lambda mod, n=n: mod.count_factors(wide, n, 100),
        )

    phi = (1 + 5**0.5) / 2
    alpha = 1 / phi
    lo = np.array([0.0, 1 - alpha])
    hi = np.array([1 - alpha, 1.0])
    shift = np.array([alpha, alpha - 1.0])
    yield (
        "code_orbit_interval 10^6 steps",
        lambda mod: mod.code_orbit_interval(0.0, lo, hi, shift, 10**6, 1e-9),
    )

    T = hexagon_example(0)
    origin = np.array([c.origin for c in T.cells])
    minv = np.array([c._minv for c in T.cells])
    x0 = hexagon_interior_point(T)
    yield (
        "code_orbit_pgram 10^6 steps",
        lambda mod: mod.code_orbit_pgram(x0, origin, minv, T._shifts, 10**6, 1e-9),
    )


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5, help="best-of repetitions")
    args = parser.parse_args()

    if compiled is None:
        print("compiled extension not available; benchmarking pure kernels only")

    header = f"{'case':40s} {'pure [ms]':>10s} {'compiled [ms]':>14s} {'speedup':>8s}"
    print(header)
    print("-" * len(header))
    for name, fn in cases():
        t_pure = best_of(lambda: fn(pure), args.repeat)
        if compiled is None:
            print(f"{name:40s} {1e3 * t_pure:10.2f} {'-':>14s} {'-':>8s}")
            continue
        t_comp = best_of(lambda: fn(compiled), args.repeat)
        print(
            f"{name:40s} {1e3 * t_pure:10.2f} {1e3 * t_comp:14.2f} "
            f"{t_pure / t_comp:7.1f}x"
        )


if __name__ == "__main__":
    main()
