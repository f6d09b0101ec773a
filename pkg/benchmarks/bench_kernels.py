"""Compare the compiled and pure-Python graph kernels on random sparse graphs.

    python benchmarks/bench_kernels.py --sizes 1000 10000 100000 --repeat 3

Both variants must return identical results; the script stops if they differ.
Set PKSCHECK_DISABLE_NUMBA=1 to confirm the pure fallback runs alone.
"""
import argparse
import time

import numpy as np

from pkscheck import _kernels


def random_csr(rng, n, mean_degree):
    degrees = rng.poisson(mean_degree, size=n)
    indptr = np.concatenate([[0], np.cumsum(degrees)]).astype(np.int64)
    indices = rng.integers(0, n, size=int(indptr[-1]), dtype=np.int64)
    return indptr, indices


def best_of(fn, repeat):
    times, out = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[1_000, 10_000, 100_000])
    ap.add_argument("--degree", type=float, default=2.0)
    ap.add_argument("--accepting", type=float, default=0.0005, help="fraction of accepting nodes")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    if not _kernels.HAVE_NUMBA:
        print("numba unavailable or disabled; timing the pure kernels only")
    rng = np.random.default_rng(args.seed)
    init = np.array([0], dtype=np.int64)
    print(f"{'kernel':<11}{'nodes':>9}{'edges':>10}{'python s':>11}{'numba s':>10}{'speedup':>9}")
    for n in args.sizes:
        indptr, indices = random_csr(rng, n, args.degree)
        acc = rng.random(n) < args.accepting
        cases = {
            "nested_dfs": lambda jit: _kernels.nested_dfs(indptr, indices, acc, init, jit=jit),
            "tarjan": lambda jit: _kernels.tarjan(indptr, indices, jit=jit),
        }
        for name, fn in cases.items():
            t_py, out_py = best_of(lambda: fn(False), args.repeat)
            if _kernels.HAVE_NUMBA:
                fn(True)  # compile outside the timed region
                t_jit, out_jit = best_of(lambda: fn(True), args.repeat)
                same = all(np.array_equal(a, b) for a, b in zip(out_py, out_jit)) if name == "nested_dfs" \
                    else np.array_equal(out_py, out_jit)
                if not same:
                    raise SystemExit(f"{name}: compiled and pure results differ at n={n}")
                print(f"{name:<11}{n:>9}{len(indices):>10}{t_py:>11.4f}{t_jit:>10.4f}{t_py / t_jit:>8.1f}x")
            else:
                print(f"{name:<11}{n:>9}{len(indices):>10}{t_py:>11.4f}{'-':>10}{'-':>9}")


if __name__ == "__main__":
    main()
