"""
Independent reference computations used by the tests.

Nothing here calls the kernels or the recursion under test: operators are
assembled as dense matrices straight from their defining formulas.
"""

import math

import numpy as np

from speclab.lattice import CoinField, CoinSite, ShiftParams, State


def dense_S(p, q, lo, hi):
    """S on [lo, hi] with couplings leaving the window dropped; index 2*(x-lo)+c."""
    n = hi - lo + 1
    M = np.zeros((2 * n, 2 * n), dtype=complex)
    for i in range(n):
        M[2 * i, 2 * i] = p
        if i + 1 < n:
            M[2 * i, 2 * (i + 1) + 1] = q
        if i - 1 >= 0:
            M[2 * i + 1, 2 * (i - 1)] = np.conj(q)
        M[2 * i + 1, 2 * i + 1] = -p
    return M


def dense_C(coins: CoinField, lo, hi):
    n = hi - lo + 1
    M = np.zeros((2 * n, 2 * n), dtype=complex)
    for i, x in enumerate(range(lo, hi + 1)):
        M[2 * i : 2 * i + 2, 2 * i : 2 * i + 2] = coins.site(x).matrix
    return M


def embed(psi: State, lo, hi):
    return psi.on_window(lo, hi).values.reshape(-1)


def dense_apply(M, psi: State, lo, hi):
    return State(lo, (M @ embed(psi, lo, hi)).reshape(-1, 2))


def dense_U_power(shift: ShiftParams, coins: CoinField, psi: State, t: int) -> State:
    """U^t psi via a dense matrix on a window wide enough to hold the light cone."""
    lo, hi = psi.x_min - t - 1, psi.x_max + t + 1
    U = dense_S(shift.p, shift.q, lo, hi) @ dense_C(coins, lo, hi)
    return State(lo, (np.linalg.matrix_power(U, t) @ embed(psi, lo, hi)).reshape(-1, 2))


def bisect(f, lo, hi, tol=1e-15, iters=200):
    flo = f(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)


def kitagawa_beta(theta_minus, theta_plus, theta2, sign):
    """Closed forms of the Kitagawa side constants written out by hand."""
    sm, sp, s2 = math.sin(theta_minus / 2), math.sin(theta_plus / 2), math.sin(theta2 / 2)
    lo = (1 - sm) / (1 + sm) * (1 - sign * s2) / (1 + sign * s2)
    hi = (1 + sp) / (1 - sp) * (1 + sign * s2) / (1 - sign * s2)
    return lo, hi


def rotation(theta):
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]])


def kitagawa_ss_dense(theta1, theta2, lo, hi):
    """sigma_1 S_- R(theta2) S_+ R(theta1) sigma_1 on a window, dense."""
    n = hi - lo + 1
    Sp = np.zeros((2 * n, 2 * n))
    Sm = np.zeros((2 * n, 2 * n))
    for i in range(n):
        # (S_+ psi)(x) = (psi_1(x-1), psi_2(x)); (S_- psi)(x) = (psi_1(x), psi_2(x+1))
        if i - 1 >= 0:
            Sp[2 * i, 2 * (i - 1)] = 1
        Sp[2 * i + 1, 2 * i + 1] = 1
        Sm[2 * i, 2 * i] = 1
        if i + 1 < n:
            Sm[2 * i + 1, 2 * (i + 1) + 1] = 1
    R1 = np.kron(np.eye(n), rotation(theta1))
    R2 = np.kron(np.eye(n), rotation(theta2))
    X = np.kron(np.eye(n), np.array([[0, 1], [1, 0]]))
    return X @ Sm @ R2 @ Sp @ R1 @ X


def random_coin(rng) -> CoinSite:
    phi = rng.uniform(0.05, math.pi - 0.05)
    eta = rng.uniform(0, 2 * math.pi)
    return CoinSite(math.cos(phi), math.sin(phi) * complex(math.cos(eta), math.sin(eta)))


def random_coin_field(rng, lo=-10, hi=10, limits=True) -> CoinField:
    sites = [random_coin(rng) for _ in range(hi - lo + 1)]
    if limits:
        return CoinField.from_sites(lo, sites, random_coin(rng), random_coin(rng))
    return CoinField.from_sites(lo, sites)


def random_shift(rng) -> ShiftParams:
    p = rng.uniform(-0.95, 0.95)
    return ShiftParams.from_p(p, phase=rng.uniform(0, 2 * math.pi))


def random_state(rng, lo, hi) -> State:
    n = hi - lo + 1
    v = rng.normal(size=(n, 2)) + 1j * rng.normal(size=(n, 2))
    return State(lo, v).normalized()


def dense_T(shift: ShiftParams, coins: CoinField, lo, hi):
    """d S d* on a window as a product of dense matrices; rows of d are chi(x)^H."""
    n = hi - lo + 1
    d = np.zeros((n, 2 * n), dtype=complex)
    for i, x in enumerate(range(lo, hi + 1)):
        c = coins.site(x)
        # +1 eigenvector from numpy, gauge fixed to the documented convention
        # (second component real positive, or (1, 0) when it vanishes)
        w, v = np.linalg.eigh(c.matrix)
        chi = v[:, np.argmax(w)]
        k = 1 if abs(chi[1]) > 1e-12 else 0
        chi = chi * (abs(chi[k]) / chi[k])
        d[i, 2 * i : 2 * i + 2] = chi.conj()
    return d @ dense_S(shift.p, shift.q, lo, hi) @ d.conj().T
