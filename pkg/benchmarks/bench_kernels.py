"""Leapfrog kernel throughput: compiled extension vs numpy fallback.

    python benchmarks/bench_kernels.py [--n 512] [--steps 200] [--repeat 3]
"""
import argparse
import time

import numpy as np

from polyscat._ext import _leapfrog_py

try:
    from polyscat._ext import _leapfrog
except ImportError:
    _leapfrog = None


def setup(n, steps, seed=0):
    rng = np.random.default_rng(seed)
    u_prev, u = 1e-3 * rng.standard_normal((2, n, n))
    a = np.full((n, n), 0.24)
    src = np.zeros((n, n))
    src[n // 2, n // 2] = 1.0
    ones = np.ones((n, n))
    return u_prev, u, np.zeros((n, n)), a, src, np.sin(np.arange(steps)), ones, ones


def bench(advance, state, repeat):
    best = np.inf
    for _ in range(repeat):
        bufs = [np.array(x, copy=True) for x in state]
        t0 = time.perf_counter()
        advance(*bufs)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=512)
    ap.add_argument("--steps", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    state = setup(args.n, args.steps)
    updates = (args.n - 2) ** 2 * args.steps
    rows = [("numpy", _leapfrog_py.advance)]
    if _leapfrog is not None:
        rows.insert(0, ("cython", _leapfrog.advance))
    else:
        print("compiled extension not built; timing the fallback only")
    base = None
    for name, fn in rows:
        t = bench(fn, state, args.repeat)
        base = base or t
        print(f"{name:7s} {t:8.3f}s  {updates / t / 1e6:8.1f} Mupd/s  x{t / base:.2f} vs first")


if __name__ == "__main__":
    main()
