"""
Time the walk kernels under both backends.

    python3 benchmarks/bench_kernels.py [--sites 2001] [--steps 500] [--repeat 5]

Both variants are imported explicitly, so SPECLAB_NO_NUMBA does not matter
here.  The numba timings exclude the first (compiling) call.
"""

import argparse
import time

import numpy as np

from speclab import kernels
from speclab._accel import HAVE_NUMBA


def _inputs(n, t, seed=0):
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=(n, 2)) + 1j * rng.normal(size=(n, 2))
    phi = rng.uniform(0.1, 3.0, size=n + 2 * t)
    a = np.cos(phi)
    b = np.sin(phi) * np.exp(1j * rng.uniform(0, 2 * np.pi, size=n + 2 * t))
    return psi, a, b, 0.3, complex(np.sqrt(0.91))


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sites", type=int, default=2001)
    ap.add_argument("--steps", type=int, default=500)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    psi, a, b, p, q = _inputs(args.sites, args.steps)
    a1, b1 = a[: args.sites], b[: args.sites]

    rows = []
    cases = [
        ("step", "numpy", lambda: kernels.step_numpy(psi, a1, b1, p, q)),
        ("evolve", "numpy", lambda: kernels.evolve_numpy(psi, a, b, p, q, args.steps)),
    ]
    if HAVE_NUMBA:
        kernels.step_numba(psi, a1, b1, p, q)
        kernels.evolve_numba(psi, a, b, p, q, 1)
        cases += [
            ("step", "numba", lambda: kernels.step_numba(psi, a1, b1, p, q)),
            ("evolve", "numba", lambda: kernels.evolve_numba(psi, a, b, p, q, args.steps)),
        ]
    results = {}
    for name, backend, fn in cases:
        t, out = best_of(fn, args.repeat)
        results[(name, backend)] = (t, out)
        rows.append((name, backend, t))

    print(f"sites={args.sites} steps={args.steps} repeat={args.repeat}")
    print(f"{'kernel':8s} {'backend':8s} {'best [ms]':>10s}")
    for name, backend, t in rows:
        print(f"{name:8s} {backend:8s} {1e3 * t:10.3f}")
    if HAVE_NUMBA:
        for name in ("step", "evolve"):
            tn, on = results[(name, "numpy")]
            tj, oj = results[(name, "numba")]
            print(f"{name}: numpy/numba = {tn / tj:.2f}x, max |diff| = {np.max(np.abs(on - oj)):.1e}")


if __name__ == "__main__":
    main()
