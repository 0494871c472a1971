"""Compare the compiled and numpy kernels.

    python benchmarks/bench_kernel.py [--bits 20] [--census]

Reports table build time, probe throughput of Matcher.sweep, and
optionally the end-to-end C(2, L1) census for each backend.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from carmichael import fixtures, kernel
from carmichael.mitm import census_rigid


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def bench(name, L, bits, sweep, repeat):
    k = kernel.get_backend(name)
    rng = np.random.default_rng(1)
    mults = rng.integers(1, L, bits, dtype=np.uint64)
    t_build, X = best_of(lambda: k.subset_residues(mults, 1, L), repeat)
    Xs = np.sort(X)
    Y = k.subset_residues(rng.integers(1, L, bits, dtype=np.uint64), 1, L)
    d = rng.integers(1, L, sweep, dtype=np.uint64)
    matcher = k.Matcher(Xs, L)
    t_sweep, _ = best_of(lambda: matcher.sweep(Y, d), repeat)
    probes = len(Y) * sweep
    return t_build, t_sweep, probes


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--bits", type=int, default=20, help="table block size")
    ap.add_argument("--sweep", type=int, default=16, help="sweep residues per run")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--census", action="store_true", help="also time the C(2, L1) census")
    args = ap.parse_args()
    L = 28981165224211200  # lcm(L2, 1153**2 - 1), the largest modulus in use
    print(f"modulus {L}, tables 2^{args.bits}, sweep {args.sweep} x 2^{args.bits}")
    print(f"{'backend':8} {'build (s)':>10} {'sweep (s)':>10} {'ns/probe':>9}")
    for name in kernel.available_backends():
        tb, ts, probes = bench(name, L, args.bits, args.sweep, args.repeat)
        print(f"{name:8} {tb:10.3f} {ts:10.3f} {ts / probes * 1e9:9.2f}")
    if args.census:
        for name in kernel.available_backends():
            t, res = best_of(lambda: census_rigid(2, fixtures.L1.factored, backend=name), 1)
            print(f"census C(2,L1) {name:8} {res.count} hits in {t:.2f}s")


if __name__ == "__main__":
    main()
