"""Compare the compiled row-reduction kernel against the numpy fallback.

Row reduction over F_p dominates spinning, nullspaces, and intertwiner
solves, so it is the only kernel with two implementations.  This script
times both on the same inputs and reports the ratio; matmul_mod is listed
once for scale (it is shared BLAS code, identical in both modes).
"""

import argparse
import time

import numpy as np

from hamrep import _kernels_py
from hamrep.kernels import matmul_mod

try:
    from hamrep import _kernels as compiled
except ImportError:
    compiled = None


def time_call(fn, *args, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_rref(rng, p, size, repeats):
    mat = rng.integers(0, p, size=(size, size))
    t_py = time_call(lambda: _kernels_py.rref(mat.copy(), p), repeats=repeats)
    if compiled is None:
        return t_py, None
    t_c = time_call(lambda: compiled.rref(mat.copy(), p), repeats=repeats)
    red_c, rank_c, _ = compiled.rref(mat.copy(), p)
    red_p, rank_p, _ = _kernels_py.rref(mat.copy(), p)
    assert rank_c == rank_p and np.array_equal(red_c, red_p)
    return t_py, t_c


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--p", type=int, default=5)
    parser.add_argument("--sizes", type=int, nargs="+",
                        default=[50, 100, 200, 400])
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    rng = np.random.default_rng(args.seed)

    print(f"rref over F_{args.p}, best of {args.repeats}")
    print(f"{'size':>6} {'python':>10} {'compiled':>10} {'speedup':>8}")
    for size in args.sizes:
        t_py, t_c = bench_rref(rng, args.p, size, args.repeats)
        if t_c is None:
            print(f"{size:>6} {t_py * 1e3:>8.2f}ms {'-':>10} {'-':>8}")
        else:
            print(f"{size:>6} {t_py * 1e3:>8.2f}ms {t_c * 1e3:>8.2f}ms "
                  f"{t_py / t_c:>7.1f}x")

    size = args.sizes[-1]
    a = rng.integers(0, args.p, size=(size, size))
    b = rng.integers(0, args.p, size=(size, size))
    t_mm = time_call(lambda: matmul_mod(a, b, args.p), repeats=args.repeats)
    print(f"\nmatmul_mod at {size}x{size} (shared BLAS path): "
          f"{t_mm * 1e3:.2f}ms")


if __name__ == "__main__":
    main()
