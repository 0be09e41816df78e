#!/usr/bin/env python3
"""Numerov kernel: numba vs pure Python.

Usage:
    python benchmarks/bench_numerov.py [--points 4001] [--repeat 20]

Two measurements:
    - the shooting kernel alone, compiled and as plain Python (same source);
    - the full eigenvalue oracle on every sample instance, once per backend,
      each in a fresh interpreter so TSIP_DISABLE_NUMBA takes effect.
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from tsip import numerov

SWEEP = """
import time
from tsip.families import SAMPLE_PARAMS, instantiate
from tsip.numerov import BACKEND
from tsip.verify import numerov_level
t = time.perf_counter()
levels = 0
for name, sets in SAMPLE_PARAMS.items():
    for p in sets:
        inst = instantiate(name, p)
        mb = inst.max_bound_index
        for n in range((5 if mb is None else min(5, mb)) + 1):
            numerov_level(inst, n, {points})
            levels += 1
print(BACKEND, levels, time.perf_counter() - t)
"""


def time_kernel(fn, q, h2, repeat):
    psi = np.zeros_like(q)
    fn(q, h2, 0, len(q) - 1, 1, psi)  # warm-up (compiles the numba version)
    t = time.perf_counter()
    for _ in range(repeat):
        fn(q, h2, 0, len(q) - 1, 1, psi)
    return (time.perf_counter() - t) / repeat


def run_sweep(points, disable):
    env = dict(os.environ)
    env["TSIP_DISABLE_NUMBA"] = "1" if disable else "0"
    out = subprocess.run([sys.executable, "-c", SWEEP.format(points=points)], env=env,
                         capture_output=True, text=True, check=True)
    backend, levels, seconds = out.stdout.split()
    return backend, int(levels), float(seconds)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--points", type=int, default=4001)
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--skip-sweep", action="store_true")
    args = ap.parse_args()

    x = np.linspace(-8.0, 8.0, args.points)
    q = 5.0 - x**2  # harmonic well at E = 5
    h2 = (x[1] - x[0]) ** 2
    kernel = numerov._shoot
    plain = getattr(kernel, "py_func", kernel)
    t_py = time_kernel(plain, q, h2, max(1, args.repeat // 4))
    print(f"kernel  python {t_py * 1e3:9.3f} ms per shot ({args.points} points)")
    if numerov.BACKEND == "numba":
        t_nb = time_kernel(kernel, q, h2, args.repeat)
        print(f"kernel  numba  {t_nb * 1e3:9.3f} ms per shot  speedup {t_py / t_nb:6.1f}x")
    else:
        print("kernel  numba  unavailable")

    if not args.skip_sweep:
        for disable in (False, True):
            backend, levels, seconds = run_sweep(args.points, disable)
            print(f"oracle  {backend:6s} {seconds:9.2f} s for {levels} levels")


if __name__ == "__main__":
    main()
