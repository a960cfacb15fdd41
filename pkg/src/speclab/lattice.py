"""
States, shift and coin parameters, and the elementary operators S, C, d, d*.

States are dense arrays on an integer window and vanish outside it.  Every
type here is immutable after construction; the numpy buffers are flagged
read-only.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import HypothesisViolation

__all__ = [
    "ShiftParams",
    "CoinSite",
    "CoinField",
    "State",
    "ScalarField",
    "chi_of",
    "chi_arrays",
    "apply_S",
    "apply_C",
    "d_apply",
    "d_star_apply",
    "SIGMA1",
]

NORM_TOL = 1e-12
COMPACT_THRESHOLD = 1e-300


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ShiftParams:
    """The pair (p, q) of the self-adjoint shift, p real and p^2 + |q|^2 = 1."""

    p: float
    q: complex

    def __post_init__(self):
        p = float(self.p)
        q = complex(self.q)
        norm = math.hypot(p, abs(q))
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"shift parameters not normalized: p^2+|q|^2 = {norm**2!r}")
        p, q = p / norm, q / norm
        if abs(p) >= 1.0 - 1e-12:
            raise ValueError("|p| = 1 gives a walk that never moves; need |p| < 1")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @classmethod
    def from_p(cls, p: float, phase: float = 0.0) -> "ShiftParams":
        return cls(p, math.sqrt(max(0.0, 1.0 - p * p)) * cmath.exp(1j * phase))


@dataclass(frozen=True)
class CoinSite:
    """A coin C = [[a, b], [conj(b), -a]] with a real and a^2 + |b|^2 = 1."""

    a: float
    b: complex

    def __post_init__(self):
        a = float(self.a)
        b = complex(self.b)
        norm = math.hypot(a, abs(b))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"coin not normalized: a^2+|b|^2 = {norm**2!r}")
        object.__setattr__(self, "a", a / norm)
        object.__setattr__(self, "b", b / norm)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.b.conjugate(), -self.a]], dtype=complex)

    @classmethod
    def from_chi(cls, chi: Sequence[complex]) -> "CoinSite":
        """The coin 2|chi><chi| - 1 of a unit vector chi."""
        c1, c2 = complex(chi[0]), complex(chi[1])
        nrm = math.hypot(abs(c1), abs(c2))
        c1, c2 = c1 / nrm, c2 / nrm
        return cls(2.0 * abs(c1) ** 2 - 1.0, 2.0 * c1 * c2.conjugate())

    def close_to(self, other: "CoinSite", tol: float = 1e-12) -> bool:
        return abs(self.a - other.a) <= tol and abs(self.b - other.b) <= tol


SIGMA1 = CoinSite(0.0, 1.0)


def _one_minus_a(a, b):
    # 1 - a = |b|^2 / (1 + a) avoids cancellation for a near 1
    a = np.asarray(a, dtype=float)
    b2 = np.abs(np.asarray(b)) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(a > 0, b2 / (1.0 + a), 1.0 - a)


def chi_arrays(a, b) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized +1 eigenvectors chi ∝ (b, 1 - a), or (1, 0) when b = 0 and a = 1."""
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=complex))
    oma = np.atleast_1d(_one_minus_a(a, b))
    degenerate = oma <= 0.0
    safe = np.where(degenerate, 1.0, oma)
    scale = 1.0 / np.sqrt(2.0 * safe)
    chi1 = np.where(degenerate, 1.0 + 0j, b * scale)
    chi2 = np.where(degenerate, 0.0 + 0j, safe * scale + 0j)
    return chi1, chi2


def chi_of(coin: CoinSite) -> np.ndarray:
    """Normalized chi with C chi = chi, phase fixed by chi ∝ (b, 1 - a)."""
    c1, c2 = chi_arrays(coin.a, coin.b)
    return np.array([c1[0], c2[0]])


@dataclass(frozen=True)
class CoinField:
    """
    A coin at every site of Z.

    ``a``/``b`` tabulate the coin on ``[x0, x0 + len(a) - 1]``.  Outside the
    table the declared limit coins are used; without a declared limit the
    nearest tabulated coin is repeated.

    ``chi_phase`` optionally multiplies chi(x) by a unit phase; it changes no
    operator, only the representative of ker(C(x) - 1).
    """

    x0: int
    a: np.ndarray
    b: np.ndarray
    limit_minus: Optional[CoinSite] = None
    limit_plus: Optional[CoinSite] = None
    chi_phase: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, compare=False)

    def __post_init__(self):
        a = np.array(self.a, dtype=float).reshape(-1)
        b = np.array(self.b, dtype=complex).reshape(-1)
        if a.size == 0 or a.shape != b.shape:
            raise ValueError("coin table must be nonempty with matching a and b")
        dev = np.abs(np.hypot(a, np.abs(b)) - 1.0)
        if dev.max() > NORM_TOL:
            bad = int(np.argmax(dev))
            raise ValueError(f"coin at site {self.x0 + bad} not normalized")
        nrm = np.hypot(a, np.abs(b))
        object.__setattr__(self, "x0", int(self.x0))
        object.__setattr__(self, "a", _frozen(a / nrm))
        object.__setattr__(self, "b", _frozen(b / nrm))

    @classmethod
    def constant(cls, coin: CoinSite) -> "CoinField":
        return cls(0, [coin.a], [coin.b], coin, coin)

    @classmethod
    def from_sites(cls, x0: int, sites: Sequence[CoinSite], limit_minus=None, limit_plus=None):
        return cls(x0, [s.a for s in sites], [s.b for s in sites], limit_minus, limit_plus)

    @classmethod
    def from_chi(cls, x0: int, chi: np.ndarray, limit_minus=None, limit_plus=None):
        sites = [CoinSite.from_chi(c) for c in np.asarray(chi)]
        return cls.from_sites(x0, sites, limit_minus, limit_plus)

    @property
    def x1(self) -> int:
        return self.x0 + self.a.size - 1

    @property
    def has_limits(self) -> bool:
        return self.limit_minus is not None and self.limit_plus is not None

    def with_chi_phase(self, phase: Callable[[np.ndarray], np.ndarray]) -> "CoinField":
        return CoinField(self.x0, self.a, self.b, self.limit_minus, self.limit_plus, phase)

    def site(self, x: int) -> CoinSite:
        a, b = self.arrays(x, x)
        return CoinSite(a[0], b[0])

    def arrays(self, x_min: int, x_max: int) -> tuple[np.ndarray, np.ndarray]:
        """Coin entries (a, b) on the window [x_min, x_max]."""
        xs = np.arange(x_min, x_max + 1)
        idx = np.clip(xs - self.x0, 0, self.a.size - 1)
        a = self.a[idx].copy()
        b = self.b[idx].copy()
        if self.limit_minus is not None:
            below = xs < self.x0
            a[below] = self.limit_minus.a
            b[below] = self.limit_minus.b
        if self.limit_plus is not None:
            above = xs > self.x1
            a[above] = self.limit_plus.a
            b[above] = self.limit_plus.b
        return a, b

    def chi(self, x_min: int, x_max: int) -> tuple[np.ndarray, np.ndarray]:
        chi1, chi2 = chi_arrays(*self.arrays(x_min, x_max))
        if self.chi_phase is not None:
            ph = np.asarray(self.chi_phase(np.arange(x_min, x_max + 1)))
            chi1, chi2 = chi1 * ph, chi2 * ph
        return chi1, chi2

    def limit_chi(self, which: int) -> Optional[np.ndarray]:
        """chi of the declared limit at -inf (``which < 0``) or +inf."""
        coin = self.limit_minus if which < 0 else self.limit_plus
        if coin is None:
            return None
        chi = chi_of(coin)
        if self.chi_phase is not None:
            x = np.array([self.x0 - 1 if which < 0 else self.x1 + 1])
            chi = chi * np.asarray(self.chi_phase(x))[0]
        return chi

    def check_hypothesis2(self, tol: float = 1e-12) -> None:
        """Raise when chi_1(x) chi_2(x) vanishes on a tabulated site or a limit."""
        chi1, chi2 = self.chi(self.x0, self.x1)
        bad = np.flatnonzero((np.abs(chi1) <= tol) | (np.abs(chi2) <= tol))
        if bad.size:
            raise HypothesisViolation(int(self.x0 + bad[0]))
        for which, name in ((-1, "-inf"), (1, "+inf")):
            chi = self.limit_chi(which)
            if chi is not None and min(abs(chi[0]), abs(chi[1])) <= tol:
                raise HypothesisViolation(name)

    def sup_abs_limit(self, values: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> float:
        """sup over tabulated sites and declared limits of |values(a, b)|."""
        out = float(np.max(np.abs(values(self.a, self.b))))
        for coin in (self.limit_minus, self.limit_plus):
            if coin is not None:
                out = max(out, float(np.max(np.abs(values(np.array([coin.a]), np.array([coin.b]))))))
        return out


@dataclass(frozen=True, eq=False)
class State:
    """A C^2-valued wavefunction on [x_min, x_max], zero elsewhere."""

    x_min: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.complex128).reshape(-1, 2)
        if vals.shape[0] == 0:
            raise ValueError("state window must be nonempty")
        object.__setattr__(self, "x_min", int(self.x_min))
        object.__setattr__(self, "values", _frozen(vals))

    @classmethod
    def delta(cls, x: int, spinor: Sequence[complex]) -> "State":
        return cls(x, np.asarray(spinor, dtype=complex).reshape(1, 2))

    @classmethod
    def zeros(cls, x_min: int, x_max: int) -> "State":
        return cls(x_min, np.zeros((x_max - x_min + 1, 2), dtype=complex))

    @property
    def x_max(self) -> int:
        return self.x_min + self.values.shape[0] - 1

    @property
    def sites(self) -> np.ndarray:
        return np.arange(self.x_min, self.x_max + 1)

    def site_norms2(self) -> np.ndarray:
        return np.sum(np.abs(self.values) ** 2, axis=1)

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))

    def normalized(self) -> "State":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero state")
        return State(self.x_min, self.values / n)

    def at(self, x: int) -> np.ndarray:
        if self.x_min <= x <= self.x_max:
            return self.values[x - self.x_min].copy()
        return np.zeros(2, dtype=complex)

    def on_window(self, x_min: int, x_max: int) -> "State":
        """Restrict or zero-pad to [x_min, x_max]."""
        out = np.zeros((x_max - x_min + 1, 2), dtype=complex)
        lo, hi = max(x_min, self.x_min), min(x_max, self.x_max)
        if lo <= hi:
            out[lo - x_min : hi - x_min + 1] = self.values[lo - self.x_min : hi - self.x_min + 1]
        return State(x_min, out)

    def compact(self, threshold: float = COMPACT_THRESHOLD) -> "State":
        """Drop boundary sites whose norm is below ``threshold``; keeps at least one site."""
        keep = np.flatnonzero(np.sqrt(self.site_norms2()) >= threshold)
        if keep.size == 0:
            return State(self.x_min, self.values[:1])
        return State(self.x_min + int(keep[0]), self.values[keep[0] : keep[-1] + 1])

    def inner(self, other: "State") -> complex:
        lo, hi = min(self.x_min, other.x_min), max(self.x_max, other.x_max)
        return complex(np.vdot(self.on_window(lo, hi).values, other.on_window(lo, hi).values))

    def __sub__(self, other: "State") -> "State":
        lo, hi = min(self.x_min, other.x_min), max(self.x_max, other.x_max)
        return State(lo, self.on_window(lo, hi).values - other.on_window(lo, hi).values)

    def __add__(self, other: "State") -> "State":
        lo, hi = min(self.x_min, other.x_min), max(self.x_max, other.x_max)
        return State(lo, self.on_window(lo, hi).values + other.on_window(lo, hi).values)

    def scaled(self, c: complex) -> "State":
        return State(self.x_min, self.values * c)


@dataclass(frozen=True, eq=False)
class ScalarField:
    """An element of l^2(Z) supported on [x_min, x_max]."""

    x_min: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.complex128).reshape(-1)
        if vals.size == 0:
            raise ValueError("field window must be nonempty")
        object.__setattr__(self, "x_min", int(self.x_min))
        object.__setattr__(self, "values", _frozen(vals))

    @classmethod
    def delta(cls, x: int) -> "ScalarField":
        return cls(x, [1.0])

    @property
    def x_max(self) -> int:
        return self.x_min + self.values.size - 1

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))

    def at(self, x: int) -> complex:
        if self.x_min <= x <= self.x_max:
            return complex(self.values[x - self.x_min])
        return 0j


def apply_S(shift: ShiftParams, psi: State) -> State:
    """(S psi)(x) = (p psi_1(x) + q psi_2(x+1), conj(q) psi_1(x-1) - p psi_2(x))."""
    n = psi.values.shape[0]
    u, v = psi.values[:, 0], psi.values[:, 1]
    out = np.zeros((n + 2, 2), dtype=complex)
    out[1 : n + 1, 0] += shift.p * u
    out[0:n, 0] += shift.q * v
    out[2 : n + 2, 1] += np.conj(shift.q) * u
    out[1 : n + 1, 1] -= shift.p * v
    return State(psi.x_min - 1, out)


def apply_C(coins: CoinField, psi: State) -> State:
    a, b = coins.arrays(psi.x_min, psi.x_max)
    u, v = psi.values[:, 0], psi.values[:, 1]
    return State(psi.x_min, np.stack([a * u + b * v, np.conj(b) * u - a * v], axis=1))


def d_apply(coins: CoinField, psi: State) -> ScalarField:
    """(d psi)(x) = <chi(x), psi(x)>, antilinear in chi."""
    chi1, chi2 = coins.chi(psi.x_min, psi.x_max)
    vals = np.conj(chi1) * psi.values[:, 0] + np.conj(chi2) * psi.values[:, 1]
    return ScalarField(psi.x_min, vals)


def d_star_apply(coins: CoinField, f: ScalarField) -> State:
    chi1, chi2 = coins.chi(f.x_min, f.x_max)
    return State(f.x_min, np.stack([f.values * chi1, f.values * chi2], axis=1))
