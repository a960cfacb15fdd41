"""Time evolution Psi_{t+1} = U Psi_t through the three-term recurrence."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .lattice import CoinField, CoinSite, ShiftParams, State

__all__ = ["LocalMatrices", "local_matrices", "step", "evolve", "position_distribution"]


@dataclass(frozen=True, eq=False)
class LocalMatrices:
    P: np.ndarray
    Q: np.ndarray
    R: np.ndarray


def local_matrices(shift: ShiftParams, coin: CoinSite) -> LocalMatrices:
    """
    The 2x2 blocks of Psi_{t+1}(x) = P(x+1) Psi_t(x+1) + Q(x-1) Psi_t(x-1) + R(x) Psi_t(x).
    """
    a, b, p, q = coin.a, coin.b, shift.p, shift.q
    bc = b.conjugate()
    P = q * np.array([[bc, -a], [0, 0]], dtype=complex)
    Q = q.conjugate() * np.array([[0, 0], [a, b]], dtype=complex)
    R = p * np.array([[a, b], [-bc, a]], dtype=complex)
    return LocalMatrices(P, Q, R)


def _args(shift: ShiftParams, coins: CoinField, psi: State, grow: int):
    a, b = coins.arrays(psi.x_min - grow, psi.x_max + grow)
    return (
        np.ascontiguousarray(psi.values, dtype=np.complex128),
        np.ascontiguousarray(a, dtype=np.float64),
        np.ascontiguousarray(b, dtype=np.complex128),
        float(shift.p),
        complex(shift.q),
    )


def step(shift: ShiftParams, coins: CoinField, psi: State) -> State:
    """One application of U = SC; the window grows by one site per side."""
    vals, a, b, p, q = _args(shift, coins, psi, 0)
    return State(psi.x_min - 1, kernels.step_kernel(vals, a, b, p, q))


def evolve(shift: ShiftParams, coins: CoinField, psi0: State, t: int, compact: bool = True) -> State:
    """U^t psi0.  With ``compact`` the negligible tails (< 1e-300) are trimmed."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0:
        return psi0
    vals, a, b, p, q = _args(shift, coins, psi0, t)
    out = State(psi0.x_min - t, kernels.evolve_kernel(vals, a, b, p, q, int(t)))
    return out.compact() if compact else out


def position_distribution(psi: State) -> dict[int, float]:
    """P(X = x) = ||Psi(x)||^2 on the window of ``psi``."""
    probs = psi.site_norms2()
    return {int(x): float(w) for x, w in zip(psi.sites, probs)}
