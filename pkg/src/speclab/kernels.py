"""
Inner loops of the walk: one application of U = SC and its t-fold power.

Every kernel exists twice, as a numba-compiled loop and as a vectorized numpy
function with identical semantics.  ``step_kernel``/``evolve_kernel`` point at
the backend picked by :mod:`speclab._accel`; the explicit variants stay
importable for benchmarks and cross-checks.

Array conventions: ``psi`` has shape ``(n, 2)`` complex, ``a`` is real and
``b`` complex, both of length ``n`` and aligned with ``psi``.  The output of a
step lives on the window grown by one site per side.
"""

import numpy as np

from ._accel import USE_NUMBA, jit

__all__ = [
    "step_numpy",
    "step_numba",
    "evolve_numpy",
    "evolve_numba",
    "step_kernel",
    "evolve_kernel",
    "BACKEND",
]


def step_numpy(psi, a, b, p, q):
    n = psi.shape[0]
    u = psi[:, 0]
    v = psi[:, 1]
    cu = a * u + b * v
    cv = np.conj(b) * u - a * v
    out = np.zeros((n + 2, 2), dtype=np.complex128)
    # P(x) feeds x-1, R(x) feeds x, Q(x) feeds x+1
    out[0:n, 0] += q * cv
    out[1 : n + 1, 0] += p * cu
    out[1 : n + 1, 1] -= p * cv
    out[2 : n + 2, 1] += np.conj(q) * cu
    return out


def _step_loop(psi, a, b, p, q):
    n = psi.shape[0]
    out = np.zeros((n + 2, 2), dtype=np.complex128)
    qc = np.conj(q)
    for i in range(n):
        u = psi[i, 0]
        v = psi[i, 1]
        cu = a[i] * u + b[i] * v
        cv = np.conj(b[i]) * u - a[i] * v
        out[i, 0] += q * cv
        out[i + 1, 0] += p * cu
        out[i + 1, 1] -= p * cv
        out[i + 2, 1] += qc * cu
    return out


def evolve_numpy(psi, a, b, p, q, t):
    """``a``/``b`` cover the final window, i.e. ``len(psi) + 2*t`` sites."""
    n = psi.shape[0]
    cur = psi
    for s in range(t):
        lo = t - s
        cur = step_numpy(cur, a[lo : lo + n + 2 * s], b[lo : lo + n + 2 * s], p, q)
    return np.array(cur, dtype=np.complex128)


def _evolve_loop(psi, a, b, p, q, t):
    n = psi.shape[0]
    m = n + 2 * t
    cur = np.zeros((m, 2), dtype=np.complex128)
    nxt = np.zeros((m, 2), dtype=np.complex128)
    cur[t : t + n, :] = psi
    qc = np.conj(q)
    lo = t
    hi = t + n
    for _ in range(t):
        for i in range(lo - 1, hi + 1):
            nxt[i, 0] = 0.0
            nxt[i, 1] = 0.0
        for i in range(lo, hi):
            u = cur[i, 0]
            v = cur[i, 1]
            cu = a[i] * u + b[i] * v
            cv = np.conj(b[i]) * u - a[i] * v
            nxt[i - 1, 0] += q * cv
            nxt[i, 0] += p * cu
            nxt[i, 1] -= p * cv
            nxt[i + 1, 1] += qc * cu
        cur, nxt = nxt, cur
        lo -= 1
        hi += 1
    return cur


step_numba = jit(_step_loop)
evolve_numba = jit(_evolve_loop)

if USE_NUMBA:
    step_kernel = step_numba
    evolve_kernel = evolve_numba
    BACKEND = "numba"
else:
    step_kernel = step_numpy
    evolve_kernel = evolve_numpy
    BACKEND = "numpy"
