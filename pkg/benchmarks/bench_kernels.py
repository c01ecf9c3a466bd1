"""Benchmark: compiled kernels vs the numpy fallback.

Times the three hot loops (base-map iteration, Birkhoff sums of the roof
derivative, special-flow advance) on the golden asymmetric-log flow and
prints a table with the speedup.  Run from the repository root:

    python3 benchmarks/bench_kernels.py [--samples N]
"""

import argparse
import os
import sys
import time

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

import numpy as np

from ietflow import kernels
from ietflow.fixtures import asymmetric_log_roof, golden_rotation


def timed(fn, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--samples", type=int, default=200000)
    args = parser.parse_args()

    iet = golden_rotation()
    spec = asymmetric_log_roof(iet)
    tables = kernels.float_tables(iet, spec)
    rng = np.random.default_rng(1)
    x = rng.uniform(0.001, 0.999, args.samples)
    y = rng.uniform(0.0, 0.9, args.samples)

    fallback = kernels.load_fallback()
    compiled = kernels.load_compiled()
    if compiled is None:
        print("compiled kernels unavailable; timing the numpy fallback only")
    modules = [("numpy", fallback)] + ([("cython", compiled)]
                                       if compiled else [])

    workloads = [
        ("iterate x200", lambda mod: kernels.iet_iterate(
            tables, x, 200, module=mod)),
        ("birkhoff f' r=200", lambda mod: kernels.birkhoff_sums(
            tables, x, 200, derivative=True, module=mod)),
        ("flow t=50", lambda mod: kernels.flow_points(
            tables, x, y, 50.0, module=mod)),
    ]

    print("%-20s %12s %12s %9s" % ("workload", "numpy [s]", "cython [s]",
                                   "speedup"))
    for name, fn in workloads:
        times = {}
        for label, mod in modules:
            times[label] = timed(lambda m=mod: fn(m))
        if "cython" in times:
            print("%-20s %12.3f %12.3f %8.1fx"
                  % (name, times["numpy"], times["cython"],
                     times["numpy"] / times["cython"]))
        else:
            print("%-20s %12.3f %12s %9s" % (name, times["numpy"], "-", "-"))

    # correctness spot check between the two implementations
    if compiled is not None:
        a = kernels.birkhoff_sums(tables, x[:1000], 100, derivative=True,
                                  module=compiled)
        b = kernels.birkhoff_sums(tables, x[:1000], 100, derivative=True,
                                  module=fallback)
        err = float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-30)))
        print("max relative disagreement (r=100 derivative sums): %.2e" % err)


if __name__ == "__main__":
    main()
