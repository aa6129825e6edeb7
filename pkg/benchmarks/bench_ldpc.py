#!/usr/bin/env python3
"""Throughput comparison of the compiled BP kernel vs the numpy fallback.

The decoder is the loop that dominates coded-link simulations, which is why
it ships as a Cython extension with a pure-numpy backup. Run after an
editable install:

    python3 benchmarks/bench_ldpc.py [--lengths 1024,4096] [--codewords 64]
"""

import argparse
import time

import numpy as np

from mamimo.ldpc import _bp_numpy, backend_name, decode_batch, encode, make_regular_code


def make_workload(code, count, ebn0_db, rng):
    sigma2 = 1.0 / (2 * code.rate * 10 ** (ebn0_db / 10))
    u = rng.integers(0, 2, (count, code.k)).astype(np.uint8)
    x = np.stack([encode(code, u[i]) for i in range(count)])
    y = (1.0 - 2.0 * x.astype(float)) + rng.standard_normal((count, code.n)) * np.sqrt(sigma2)
    return 2 * y / sigma2


def bench(fn, llrs, repeats=3):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(llrs)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--lengths", default="1024,4096")
    ap.add_argument("--codewords", type=int, default=64)
    ap.add_argument("--ebn0-db", type=float, default=1.8, help="near-waterfall operating point")
    ap.add_argument("--max-iterations", type=int, default=50)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    print(f"active backend: {backend_name()}")
    header = f"{'n':>6} {'cw':>4} {'compiled':>12} {'numpy':>12} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for n in (int(v) for v in args.lengths.split(",")):
        code = make_regular_code(n)
        llrs = make_workload(code, args.codewords, args.ebn0_db, rng)
        bits = args.codewords * code.n

        t_numpy = bench(lambda x: _bp_numpy.decode_batch(code, x, args.max_iterations), llrs)
        if backend_name() == "cython":
            t_fast = bench(lambda x: decode_batch(code, x, args.max_iterations), llrs)
        else:
            t_fast = float("nan")
        ratio = t_numpy / t_fast if t_fast == t_fast else float("nan")
        print(
            f"{n:>6} {args.codewords:>4} "
            f"{bits / t_fast / 1e6:>9.1f} Mb/s {bits / t_numpy / 1e6:>9.1f} Mb/s {ratio:>7.1f}x"
        )


if __name__ == "__main__":
    main()
