#!/usr/bin/env python3
"""Timing comparison of the hot kernels: numba-jitted vs pure Python.

Run directly to time the current backend, or with --compare to run both
backends in subprocesses and print the speedups.  The fallback path is the
one users get without numba installed; it is selected here by setting
SIGMA_ATLAS_NO_NUMBA=1 before import, which swaps every kernel for its
uncompiled source (same code, same IEEE-754 results, no compilation).

    python3 benchmarks/bench_kernels.py --compare
"""

import argparse
import json
import math
import os
import subprocess
import sys
import time

import numpy as np

from sigma_atlas import backend, kernels, span_set
from sigma_atlas.decide import FIRST_ANY, start_indices


def bench(fn, warmup=1, repeat=5):
    for _ in range(warmup):
        fn()
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def wl_render_rows(scale):
    """Raster classification of the span-10 spike window."""
    s = span_set(10)
    elems = s.as_float_array()
    starts = start_indices(s, FIRST_ANY)
    side = 64 * scale
    hi = 1.05 / math.sqrt(10.0)
    step = hi / side
    xs = (np.arange(side) + 0.5) * step
    ys = hi - (np.arange(side) + 0.5) * step
    deep = 1.2 / (math.sqrt(10.0) + 1.0)
    out = np.empty((side, side), dtype=np.uint8)

    def run():
        kernels.render_rows(xs, ys, elems, starts, 10.0, 10, 4, 1e-6,
                            200_000_000, False, 0.0, False, 0.0, deep, out)

    return run


def wl_decide_batch(scale):
    """Membership decisions for random annulus points, depth 12."""
    s = span_set(5)
    elems = s.as_float_array()
    starts = start_indices(s, FIRST_ANY)
    rng = np.random.default_rng(7)
    n = 200 * scale
    mod = rng.uniform(0.45, 0.95, n)
    ang = rng.uniform(0.0, math.pi, n)
    re = mod * np.cos(ang)
    im = mod * np.sin(ang)
    codes = np.empty(n, dtype=np.int64)
    depths = np.empty(n, dtype=np.int64)

    def run():
        kernels.decide_batch(re, im, elems, starts, 5.0, 12, 1e-6,
                             200_000_000, codes, depths)

    return run


def wl_roots_batch(scale):
    """Durand-Kerner on random octic sign polynomials."""
    rng = np.random.default_rng(11)
    n = 300 * scale
    coeffs = rng.choice([-1.0, 1.0], size=(n, 9))
    degs = np.full(n, 8, dtype=np.int64)
    roots = np.empty((n, 8), dtype=np.complex128)
    resid = np.empty((n, 8), dtype=np.float64)
    dpabs = np.empty((n, 8), dtype=np.float64)
    mag = np.empty((n, 8), dtype=np.float64)
    nroots = np.empty(n, dtype=np.int64)
    ok = np.empty(n, dtype=np.bool_)

    def run():
        kernels.roots_batch(coeffs, degs, roots, resid, dpabs, mag,
                            nroots, ok)

    return run


def wl_greedy_real(scale):
    """Million-step greedy remainder walk on the real strip."""
    s = span_set(1)
    elems = s.as_float_array()
    steps = 1_000_000 * scale

    def run():
        kernels.greedy_real(elems, 1.0 / 0.7, steps, 1.0 + 1e-12)

    return run


def wl_greedy_interval(scale):
    """Million-step two-step greedy walk pinned to [0, 1]."""
    s = span_set(5)
    elems = s.as_float_array()
    r = 1.0 / 0.6
    two_r_cos = 2.0 * r * math.cos(math.pi / 4.0)
    steps = 1_000_000 * scale

    def run():
        kernels.greedy_two_step_interval(elems, two_r_cos, r * r, 0.0, 1.0,
                                         steps, 1e-12)

    return run


WORKLOADS = [
    ("render_rows", wl_render_rows),
    ("decide_batch", wl_decide_batch),
    ("roots_batch", wl_roots_batch),
    ("greedy_real", wl_greedy_real),
    ("greedy_interval", wl_greedy_interval),
]


def run_current_backend(args):
    name = "numba" if backend.USE_NUMBA else "python"
    times = {}
    for wl_name, build in WORKLOADS:
        times[wl_name] = bench(build(args.scale), repeat=args.repeat)
        if not args.json:
            print(f"  {wl_name:<16} {times[wl_name] * 1e3:10.3f} ms",
                  flush=True)
    payload = {"backend": name, "scale": args.scale, "times": times}
    if args.json:
        print(json.dumps(payload))
    return 0


def run_comparison(args):
    base = [sys.executable, os.path.abspath(__file__),
            "--scale", str(args.scale), "--repeat", str(args.repeat),
            "--json"]
    out = {}
    for label, flag in (("numba", "0"), ("python", "1")):
        env = dict(os.environ, SIGMA_ATLAS_NO_NUMBA=flag)
        proc = subprocess.run(base, env=env, check=True,
                              capture_output=True, text=True)
        out[label] = json.loads(proc.stdout)
        if out[label]["backend"] != label:
            raise RuntimeError(f"subprocess ran backend "
                               f"{out[label]['backend']!r}, wanted {label!r}")
    print(f"{'workload':<16} {'numba':>12} {'python':>14} {'speedup':>9}")
    for wl_name, _ in WORKLOADS:
        tj = out["numba"]["times"][wl_name]
        tp = out["python"]["times"][wl_name]
        print(f"{wl_name:<16} {tj * 1e3:9.3f} ms {tp * 1e3:11.3f} ms "
              f"x{tp / tj:8.1f}")
    return 0


def main(argv=None):
    ap = argparse.ArgumentParser(
        description="benchmark the hot kernels on one or both backends")
    ap.add_argument("--scale", type=int, default=1,
                    help="workload size multiplier (default 1)")
    ap.add_argument("--repeat", type=int, default=5,
                    help="timing repeats, best-of (default 5)")
    ap.add_argument("--json", action="store_true",
                    help="emit one machine-readable JSON line")
    ap.add_argument("--compare", action="store_true",
                    help="run numba and pure-Python backends, show speedups")
    args = ap.parse_args(argv)
    if args.compare:
        return run_comparison(args)
    if not args.json:
        print(f"backend: {'numba' if backend.USE_NUMBA else 'python'}")
    return run_current_backend(args)


if __name__ == "__main__":
    sys.exit(main())
