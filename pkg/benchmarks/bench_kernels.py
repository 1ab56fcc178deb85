#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Runs each kernel on identical inputs under both backends, reports best-of-5
wall times and the speedup, and asserts the outputs are bit-identical.

    python3 benchmarks/bench_kernels.py [--steps 1000000] [--repeat 5]
"""

from __future__ import annotations

import argparse
import math
import time

import numpy as np

from pairtrade import _kernels_py

try:
    from pairtrade import _kernels as _compiled
except ImportError:
    _compiled = None


def _best_of(repeat, fn, *args):
    best = math.inf
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--steps", type=int, default=1_000_000)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    u = rng.uniform(-1.0, 1.0, args.steps)
    v = rng.uniform(-1.0, 1.0, args.steps)
    theta, sigma_s, sigma_w = 0.3, 0.012, 0.005
    beta, tau, leverage, v0 = 2.0, 0.00625, 1.0, 10_000.0

    backends = [("python", _kernels_py)]
    if _compiled is not None:
        backends.append(("cython", _compiled))
    else:
        print("compiled extension not available; timing the fallback only")

    results = {}
    print(f"ou_recursion, {args.steps} steps (best of {args.repeat}):")
    for name, impl in backends:
        best, (s, w) = _best_of(args.repeat, impl.ou_recursion, u, v, theta, sigma_s, sigma_w, 0.0, math.log(100.0))
        results[name] = (s, w)
        print(f"  {name:>7}: {best * 1e3:8.2f} ms")
    if len(results) == 2:
        assert np.array_equal(results["python"][0], results["cython"][0])
        assert np.array_equal(results["python"][1], results["cython"][1])
        print("  outputs bit-identical: yes")

    s, w = results[backends[-1][0]]
    p1 = np.exp(w)
    p2 = np.exp(beta * w + s)
    dv_out = np.empty(len(p1))
    sabs_out = np.empty(len(p1))

    results = {}
    print(f"trade_scan, {args.steps} periods (best of {args.repeat}):")
    for name, impl in backends:
        best, out = _best_of(
            args.repeat, impl.trade_scan, p1, p2, s, beta, tau, leverage, v0, dv_out, sabs_out
        )
        results[name] = (out, dv_out.copy())
        print(f"  {name:>7}: {best * 1e3:8.2f} ms  (events={out[0]})")
    if len(results) == 2:
        assert results["python"][0] == results["cython"][0]
        assert np.array_equal(results["python"][1], results["cython"][1])
        print("  outputs bit-identical: yes")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
