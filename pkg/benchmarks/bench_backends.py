#!/usr/bin/env python3
"""Benchmark the compiled objective kernels against the numpy fallback.

Two views:
  * microbenchmarks of each kernel at several matrix sizes;
  * an end-to-end single-rank solve run in subprocesses, once per backend
    (the backend is chosen at import time via INDEXCODING_PURE_PYTHON).

Usage: python benchmarks/bench_backends.py [--quick]
"""

import argparse
import os
import subprocess
import sys
import time
import timeit

import numpy as np

from indexcoding.kernels import _reference

try:
    from indexcoding.kernels import _kernels as _compiled
except ImportError:
    _compiled = None

KERNELS = ["reg_value", "reg_gmat", "reg_gdot", "ref_value", "ref_gmat", "ref_gdot"]


def _inputs(K, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((K, K))
    Xdot = rng.standard_normal((K, K))
    mask = (rng.random((K, K)) < 0.4).astype(np.float64)
    np.fill_diagonal(mask, 0.0)
    return X, Xdot, mask


def _call(impl, name, X, Xdot, mask):
    if name == "reg_value":
        return impl.reg_value(X, 0.001, 0.01)
    if name == "reg_gmat":
        return impl.reg_gmat(X, 0.001, 0.01)
    if name == "reg_gdot":
        return impl.reg_gdot(X, Xdot, 0.001, 0.01)
    if name == "ref_value":
        return impl.ref_value(X, mask)
    if name == "ref_gmat":
        return impl.ref_gmat(X, mask)
    return impl.ref_gdot(Xdot, mask)


def micro(sizes, repeats):
    print(f"{'kernel':<10} {'K':>4} {'numpy us':>10} {'cython us':>10} {'speedup':>8}")
    for K in sizes:
        X, Xdot, mask = _inputs(K)
        for name in KERNELS:
            t_ref = (
                timeit.timeit(
                    lambda: _call(_reference, name, X, Xdot, mask), number=repeats
                )
                / repeats
                * 1e6
            )
            if _compiled is None:
                print(f"{name:<10} {K:>4} {t_ref:>10.2f} {'n/a':>10} {'n/a':>8}")
                continue
            t_cy = (
                timeit.timeit(
                    lambda: _call(_compiled, name, X, Xdot, mask), number=repeats
                )
                / repeats
                * 1e6
            )
            print(
                f"{name:<10} {K:>4} {t_ref:>10.2f} {t_cy:>10.2f} {t_ref / t_cy:>7.1f}x"
            )


def end_to_end(K, rank):
    script = (
        "import time; t0=time.perf_counter(); "
        "from indexcoding.pipeline import PipelineConfig, solve_one; "
        "import indexcoding.kernels as k; "
        f"sol = solve_one({K}, {rank}, PipelineConfig(seed=7, restarts=4)); "
        "print(f'{k.BACKEND}: s={sol.side_info_amount} "
        "feasible={sol.feasible} wall={time.perf_counter()-t0:.2f}s')"
    )
    for pure in ("0", "1"):
        env = dict(os.environ)
        env["INDEXCODING_PURE_PYTHON"] = pure
        subprocess.run([sys.executable, "-c", script], env=env, check=True)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--quick", action="store_true", help="fewer repeats")
    args = ap.parse_args()
    repeats = 2000 if args.quick else 20000

    if _compiled is None:
        print("compiled kernels not available; showing numpy timings only\n")

    print("== kernel microbenchmarks ==")
    micro((8, 16, 32, 64), repeats)

    print(f"\n== end-to-end solve (K=16, rank=8, 4 restarts) per backend ==")
    t0 = time.perf_counter()
    end_to_end(16, 8)
    print(f"(total benchmark wall time {time.perf_counter() - t0:.1f}s)")


if __name__ == "__main__":
    main()
