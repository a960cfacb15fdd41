"""
Coin families with known birth-space behaviour.

* anisotropic walk: chi(x) tends to (sqrt(1-eps^2), eps) at +inf and to
  (eps, sqrt(1-eps^2)) at -inf.  Both birth spaces are one-dimensional below
  a threshold eps_0(p) and trivial above it.
* Kitagawa split-step walk: p = sin(theta2/2), q = cos(theta2/2) and
  C(x) = R(theta1(x)) sigma_1, so a = -sin(theta1/2), b = cos(theta1/2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .birth import Verdict
from .errors import BoundaryCase
from .lattice import CoinField, CoinSite, ShiftParams

__all__ = [
    "AnisotropicSpec",
    "KitagawaSpec",
    "g",
    "anisotropic_limits",
    "anisotropic_coin",
    "rotate_chi",
    "epsilon0",
    "kitagawa_site",
    "kitagawa_coin",
    "predict_theorem_6_1",
    "predict_theorem_6_2",
]


def g(eps: float) -> float:
    return eps * eps / (1.0 - eps * eps)


@dataclass(frozen=True)
class AnisotropicSpec:
    epsilon: float
    interpolation: str = "step"  # "step" or "table"
    width: int = 20

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.interpolation not in ("step", "table"):
            raise ValueError(f"unknown interpolation {self.interpolation!r}")


def anisotropic_limits(eps: float) -> tuple[CoinSite, CoinSite]:
    """(C_-inf, C_+inf)."""
    if not 0.0 < eps < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    off = 2.0 * eps * math.sqrt(1.0 - eps * eps)
    diag = 1.0 - 2.0 * eps * eps
    return CoinSite(-diag, off), CoinSite(diag, off)


def _chi_angle_field(x0: int, angles: np.ndarray, limits) -> CoinField:
    chi = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    return CoinField.from_chi(x0, chi, *limits)


def anisotropic_coin(spec: AnisotropicSpec) -> CoinField:
    """
    ``step``: C(x) = C_+inf for x > 0, C_-inf for x <= 0.
    ``table``: the chi angle runs linearly from its -inf value at x = -width
    to its +inf value at x = width, constant beyond.
    """
    eps = spec.epsilon
    limits = anisotropic_limits(eps)
    if spec.interpolation == "step":
        return CoinField.from_sites(0, list(limits), *limits)
    alpha_minus = math.acos(eps)
    alpha_plus = math.asin(eps)
    xs = np.arange(-spec.width, spec.width + 1)
    angles = alpha_minus + (alpha_plus - alpha_minus) * (xs + spec.width) / (2 * spec.width)
    return _chi_angle_field(-spec.width, angles, limits)


def rotate_chi(coins: CoinField, delta: Callable[[np.ndarray], np.ndarray], x_min: int, x_max: int) -> CoinField:
    """
    Rotate chi(x) by the real angle delta(x) on [x_min, x_max]; coins outside
    the range and the declared limits are unchanged.
    """
    lo, hi = min(x_min, coins.x0), max(x_max, coins.x1)
    c1, c2 = coins.chi(lo, hi)
    xs = np.arange(lo, hi + 1)
    th = np.where((xs >= x_min) & (xs <= x_max), delta(xs), 0.0)
    r1 = np.cos(th) * c1 - np.sin(th) * c2
    r2 = np.sin(th) * c1 + np.cos(th) * c2
    return CoinField.from_chi(lo, np.stack([r1, r2], axis=1), coins.limit_minus, coins.limit_plus)


def epsilon0(p: float) -> float:
    """The unique eps in (0, 1) with g(eps) = min((1-p)/(1+p), (1+p)/(1-p))."""
    if abs(p) >= 1.0:
        raise ValueError("|p| must be below 1")
    m = min((1.0 - p) / (1.0 + p), (1.0 + p) / (1.0 - p))
    return math.sqrt(m / (1.0 + m))


def _theta1_ok(theta: float) -> None:
    if not (-1e-12 <= theta < 2.0 * math.pi):
        raise ValueError(f"theta1 = {theta!r} outside [0, 2pi)")
    if abs(theta - math.pi) <= 1e-12:
        raise ValueError("theta1 = pi makes b(x) = 0")


def kitagawa_site(theta1: float) -> CoinSite:
    _theta1_ok(theta1)
    return CoinSite(-math.sin(theta1 / 2.0), math.cos(theta1 / 2.0))


@dataclass(frozen=True)
class KitagawaSpec:
    """
    theta1(x) = theta_plus for x > 0 and theta_minus for x <= 0, unless
    ``table`` gives explicit angles on [table_x0, table_x0 + len(table) - 1].
    """

    theta2: float
    theta_minus: float
    theta_plus: float
    table: Optional[tuple[float, ...]] = None
    table_x0: int = 0

    def __post_init__(self):
        if not -2.0 * math.pi <= self.theta2 <= 2.0 * math.pi:
            raise ValueError("theta2 outside [-2pi, 2pi]")
        if abs(abs(self.theta2) - math.pi) <= 1e-12:
            raise ValueError("theta2 = ±pi gives |p| = 1")
        for th in (self.theta_minus, self.theta_plus, *(self.table or ())):
            _theta1_ok(th)


def kitagawa_coin(spec: KitagawaSpec) -> tuple[ShiftParams, CoinField]:
    shift = ShiftParams(math.sin(spec.theta2 / 2.0), math.cos(spec.theta2 / 2.0))
    lim_minus, lim_plus = kitagawa_site(spec.theta_minus), kitagawa_site(spec.theta_plus)
    if spec.table is None:
        coins = CoinField.from_sites(0, [lim_minus, lim_plus], lim_minus, lim_plus)
    else:
        sites = [kitagawa_site(th) for th in spec.table]
        coins = CoinField.from_sites(spec.table_x0, sites, lim_minus, lim_plus)
    return shift, coins


def predict_theorem_6_1(epsilon: float, p: float, tol: float = 1e-12) -> tuple[Verdict, Verdict]:
    """Expected (B+, B-) verdicts for the anisotropic walk."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    e0 = epsilon0(p)
    if abs(epsilon - e0) <= tol:
        raise BoundaryCase(f"boundary case: epsilon = eps_0(p) = {e0!r}")
    v = Verdict.NONTRIVIAL if epsilon < e0 else Verdict.TRIVIAL
    return v, v


def predict_theorem_6_2(
    theta_minus: float, theta_plus: float, theta2: float, margin: float = 1e-6
) -> tuple[Verdict, Verdict]:
    """
    Expected (B+, B-) verdicts for the Kitagawa walk with limits theta_±inf.

    B± is one-dimensional exactly when ∓sin(theta2/2) lies strictly between
    sin(theta_+inf/2) and sin(theta_-inf/2) (the latter being larger), and
    trivial otherwise.  Inputs within ``margin`` of a case boundary raise.
    """
    s_minus = math.sin(theta_minus / 2.0)
    s_plus = math.sin(theta_plus / 2.0)
    if abs(s_minus - s_plus) <= margin:
        raise BoundaryCase("degenerate: sin(theta_-inf/2) = sin(theta_+inf/2)")
    if s_minus < s_plus:
        return Verdict.TRIVIAL, Verdict.TRIVIAL
    out = []
    for sgn in (1, -1):
        y = -sgn * math.sin(theta2 / 2.0)
        if min(abs(y - s_plus), abs(y - s_minus)) <= margin:
            raise BoundaryCase("boundary case: ∓sin(theta2/2) on an interval endpoint")
        out.append(Verdict.NONTRIVIAL if s_plus < y < s_minus else Verdict.TRIVIAL)
    return out[0], out[1]
