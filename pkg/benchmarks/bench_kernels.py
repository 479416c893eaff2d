#!/usr/bin/env python3
"""Benchmark the compiled distance kernel against the numpy fallback.

Workloads mirror the verifier's containment loop: reduced samples against
lattice translates combined with base-set nodes, at the sizes the golden
problems actually produce plus a couple of stress points.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from torusflow._kernels import available_backends

WORKLOADS = [
    # (name, samples, translates, nodes, dim)
    ("hyperbola-like", 10_000, 25, 1, 1),
    ("cylinder-like", 50_000, 5, 64, 1),
    ("curve-prediction", 1_000, 9, 10_000, 2),
    ("stress", 2_000, 25, 10_000, 2),
]


def run(repeat):
    backends = available_backends()
    print(f"backends: {', '.join(backends)}")
    header = f"{'workload':<18} {'M':>7} {'T':>4} {'P':>7} {'q':>2}"
    header += "".join(f" {name:>12}" for name in backends)
    if len(backends) == 2:
        header += f" {'speedup':>9}"
    print(header)
    rng = np.random.default_rng(123)
    for name, m, t, p, q in WORKLOADS:
        pts = rng.normal(size=(m, q))
        offs = rng.normal(size=(t, q))
        nodes = rng.normal(size=(p, q))
        times = {}
        reference = None
        for bname, fn in backends.items():
            best = float("inf")
            for _ in range(repeat):
                t0 = time.perf_counter()
                d, _ = fn(pts, offs, nodes)
                best = min(best, time.perf_counter() - t0)
            times[bname] = best
            if reference is None:
                reference = d
            else:
                assert np.allclose(d, reference, atol=1e-8), "backends disagree"
        row = f"{name:<18} {m:>7} {t:>4} {p:>7} {q:>2}"
        row += "".join(f" {times[b] * 1e3:>10.2f}ms" for b in backends)
        if len(times) == 2:
            row += f" {times['fallback'] / times['native']:>8.1f}x"
        print(row)


if __name__ == "__main__":
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=3)
    run(parser.parse_args().repeat)
