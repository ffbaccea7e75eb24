"""Timing comparison of the pure-numpy and numba kernel backends.

Run:  python3 benchmarks/benchmark_kernels.py [--energy 325] [--repeat 5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from torusleray._kernels import jit_available, reference
from torusleray.lattice import enumerate_frequencies


def timeit(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--energy", type=int, default=325)
    parser.add_argument("--grid", type=int, default=512)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    freqs = enumerate_frequencies(2, args.energy)
    lam = np.asarray(freqs.representatives, dtype=np.float64)
    rng = np.random.default_rng(0)
    bc = rng.standard_normal((lam.shape[0], 2))
    scale = np.sqrt(2.0 / freqs.multiplicity)
    pts = rng.random((200000, 2))
    n = args.grid
    vals = reference.eval_grid_2d(lam, bc, scale, n)

    backends = [("numpy", reference)]
    if jit_available():
        from torusleray._kernels import jit

        backends.append(("numba", jit))
    else:
        print("numba backend unavailable; timing reference only")

    cases = {
        "eval_points (200k pts)": lambda k: k.eval_points(lam, bc, scale, pts),
        "eval_gradient (200k pts)": lambda k: k.eval_gradient(lam, bc, scale, pts),
        f"eval_grid_2d (n={n})": lambda k: k.eval_grid_2d(lam, bc, scale, n),
        f"count_below_2d (n={n})": lambda k: k.count_below_2d(lam, bc, scale, n, 1e-2),
        f"u_grid_2d (n={n})": lambda k: k.u_grid_2d(lam, freqs.multiplicity, n),
        f"surface_integral_2d (n={n})": lambda k: k.surface_integral_2d(vals, lam, bc, scale),
    }

    print(f"energy={args.energy} multiplicity={freqs.multiplicity} grid={n}")
    header = f"{'kernel':34s}" + "".join(f"{name:>12s}" for name, _ in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10s}"
    print(header)
    for label, call in cases.items():
        times = []
        for _, mod in backends:
            call(mod)  # warm up (and JIT compile)
            times.append(timeit(lambda m=mod: call(m), args.repeat))
        line = f"{label:34s}" + "".join(f"{t * 1e3:10.2f}ms" for t in times)
        if len(times) == 2:
            line += f"{times[0] / times[1]:9.1f}x"
        print(line)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
