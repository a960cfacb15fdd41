"""
Birth eigenspaces B± = ker d ∩ ker(S ± 1).

A vector of B± has the form Psi = (-q/(p±1) L psi, psi) where psi solves

    psi(x+1) = (p±1) conj(chi_2(x)) / (q conj(chi_1(x))) * psi(x).

Whether such a psi is square summable is decided by the squared ratios of
the recursion at the two ends of the lattice.  Nonzero vectors of B± are
eigenvectors of U = SC with eigenvalue ±1.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .errors import BirthSpaceTrivial, WindowTooSmall
from .lattice import CoinField, CoinSite, ShiftParams, State, apply_S, chi_of, d_apply
from .walk import step

__all__ = [
    "Verdict",
    "SideRatios",
    "DecayFit",
    "BirthReport",
    "RobustnessViolation",
    "side_ratios",
    "beta_constants",
    "classify",
    "construct_eigenvector",
    "verify_eigenvector",
    "decay_fit",
    "birth_report",
    "robustness_compare",
]

MARGIN = 1e-9
TAIL_SPAN = 64
EDGE = 5


class Verdict(str, enum.Enum):
    NONTRIVIAL = "NontrivialDim1"
    TRIVIAL = "Trivial"
    INCONCLUSIVE = "Inconclusive"


class RobustnessViolation(RuntimeError):
    pass


def _sign(sign) -> int:
    if sign in (1, "+", "plus"):
        return 1
    if sign in (-1, "-", "minus"):
        return -1
    raise ValueError(f"sign must be +1 or -1, got {sign!r}")


@dataclass(frozen=True)
class SideRatios:
    """
    Squared recursion ratios at both ends.

    minus side: |q chi_1 / ((p±1) chi_2)|^2 as x -> -inf
    plus side:  |(p±1) chi_2 / (q chi_1)|^2 as x -> +inf
    ``exact`` is True when both sides come from declared limit coins.
    """

    sign: int
    minus_sup: float
    minus_inf: float
    plus_sup: float
    plus_inf: float
    exact: bool = False

    @property
    def B(self) -> float:
        return max(self.minus_sup, self.plus_sup)

    @property
    def b_paper(self) -> float:
        return min(self.minus_inf, self.plus_inf)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "SideRatios":
        return cls(**d)


def _minus_ratio(shift, sign, chi1, chi2):
    return np.abs(shift.q * chi1 / ((shift.p + sign) * chi2)) ** 2


def _plus_ratio(shift, sign, chi1, chi2):
    return np.abs((shift.p + sign) * chi2 / (shift.q * chi1)) ** 2


def beta_constants(shift: ShiftParams, c_minus: CoinSite, c_plus: CoinSite, sign) -> SideRatios:
    """Side values computed from the limit coins alone."""
    s = _sign(sign)
    cm, cp = chi_of(c_minus), chi_of(c_plus)
    for chi, name in ((cm, "-inf"), (cp, "+inf")):
        if min(abs(chi[0]), abs(chi[1])) <= 1e-12:
            raise ValueError(f"limit coin at {name} has chi_1 chi_2 = 0")
    lo = float(_minus_ratio(shift, s, cm[0], cm[1]))
    hi = float(_plus_ratio(shift, s, cp[0], cp[1]))
    return SideRatios(s, lo, lo, hi, hi, exact=True)


def side_ratios(shift: ShiftParams, coins: CoinField, sign, tail: int = 30) -> SideRatios:
    """
    Declared limits give exact side values.  An undeclared side is estimated
    by max/min of the ratio over ``TAIL_SPAN`` sites starting ``tail`` sites
    beyond the coin table; that is only an approximation of limsup/liminf.
    """
    s = _sign(sign)
    coins.check_hypothesis2()
    sides = []
    for which in (-1, 1):
        chi = coins.limit_chi(which)
        ratio = _minus_ratio if which < 0 else _plus_ratio
        if chi is not None:
            v = float(ratio(shift, s, chi[0], chi[1]))
            sides.append((v, v, True))
            continue
        if which < 0:
            x_hi = min(coins.x0, 0) - tail
            c1, c2 = coins.chi(x_hi - TAIL_SPAN, x_hi)
        else:
            x_lo = max(coins.x1, 0) + tail
            c1, c2 = coins.chi(x_lo, x_lo + TAIL_SPAN)
        r = ratio(shift, s, c1, c2)
        sides.append((float(r.max()), float(r.min()), False))
    (m_sup, m_inf, m_ex), (p_sup, p_inf, p_ex) = sides
    return SideRatios(s, m_sup, m_inf, p_sup, p_inf, exact=m_ex and p_ex)


def classify(ratios: SideRatios, margin: float = MARGIN) -> Verdict:
    """
    Nontrivial when both limsups are below 1.  Trivial as soon as one side's
    liminf exceeds 1: the recursion then diverges on that side.
    """
    if max(ratios.minus_sup, ratios.plus_sup) < 1.0 - margin:
        return Verdict.NONTRIVIAL
    if max(ratios.minus_inf, ratios.plus_inf) > 1.0 + margin:
        return Verdict.TRIVIAL
    return Verdict.INCONCLUSIVE


def _recursion(shift, coins, s, x_min, x_max, seed):
    """psi on [x_min, x_max + 1] with psi(0) = seed."""
    chi1, chi2 = coins.chi(x_min, x_max)
    r = (shift.p + s) * np.conj(chi2) / (shift.q * np.conj(chi1))
    n = x_max - x_min + 2
    psi = np.zeros(n, dtype=complex)
    i0 = -x_min
    psi[i0] = seed
    # forward: psi(x+1) = r(x) psi(x) for x >= 0
    psi[i0 + 1 :] = seed * np.cumprod(r[i0:])
    # backward: psi(x-1) = psi(x) / r(x-1) for x <= 0
    if i0 > 0:
        psi[:i0] = (seed * np.cumprod(1.0 / r[:i0][::-1]))[::-1]
    return psi


def construct_eigenvector(
    shift: ShiftParams,
    coins: CoinField,
    sign,
    window=(-200, 200),
    seed: float = 1.0,
    tail_tol: float = 1e-10,
    margin: float = MARGIN,
    tail: int = 30,
) -> State:
    """The unit vector spanning B± on ``window``, seeded with psi(0) > 0."""
    s = _sign(sign)
    x_min, x_max = int(window[0]), int(window[1])
    if not x_min < 0 < x_max:
        raise ValueError("window must contain the origin in its interior")
    verdict = classify(side_ratios(shift, coins, s, tail), margin)
    if verdict is not Verdict.NONTRIVIAL:
        raise BirthSpaceTrivial(f"birth space trivial or inconclusive for sign {s:+d} ({verdict.value})")
    psi = _recursion(shift, coins, s, x_min, x_max, seed)
    upper = -shift.q / (shift.p + s) * psi[1:]
    vals = np.stack([upper, psi[:-1]], axis=1)
    state = State(x_min, vals).normalized()
    w = state.site_norms2()
    tail_mass = float(w[:EDGE].sum() + w[-EDGE:].sum())
    if tail_mass > tail_tol:
        raise WindowTooSmall(
            f"mass {tail_mass:.3g} on the outer {EDGE} sites exceeds {tail_tol:g}; enlarge the window"
        )
    return state


def verify_eigenvector(shift: ShiftParams, coins: CoinField, psi: State, sign, edge: int = 2) -> float:
    """
    max(||d Psi||, ||(S ± 1) Psi||, ||U Psi ∓ Psi||) / ||Psi|| on the window
    minus ``edge`` sites per side.  The zero state returns +inf.
    """
    s = _sign(sign)
    nrm = psi.norm()
    if nrm == 0.0:
        return math.inf
    lo, hi = psi.x_min + edge, psi.x_max - edge
    if lo > hi:
        raise ValueError("window too short for the requested edge exclusion")
    dpsi = d_apply(coins, psi).values[edge : psi.values.shape[0] - edge]
    spsi = (apply_S(shift, psi) + psi.scaled(s)).on_window(lo, hi)
    upsi = (step(shift, coins, psi) - psi.scaled(s)).on_window(lo, hi)
    return max(float(np.linalg.norm(dpsi)), spsi.norm(), upsi.norm()) / nrm


@dataclass(frozen=True)
class DecayFit:
    slope_plus: float
    slope_minus: float
    r2_plus: float
    r2_minus: float
    tail_start: int

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "DecayFit":
        return cls(**d)


def _ols(x, y):
    slope, intercept = np.polyfit(x, y, 1)
    ss_res = float(np.sum((y - (slope * x + intercept)) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), r2


def decay_fit(psi: State, tail_start: int, tail_end: Optional[int] = None) -> DecayFit:
    """
    Least-squares slopes of log ||Psi(x)||^2 against x on [tail_start, tail_end]
    and on [-tail_end, -tail_start].  ``tail_end`` defaults to five sites short
    of each window edge.
    """
    x = psi.sites
    w = psi.site_norms2()
    hi = psi.x_max - EDGE if tail_end is None else min(tail_end, psi.x_max)
    lo = psi.x_min + EDGE if tail_end is None else max(-tail_end, psi.x_min)
    fits = []
    for mask in ((x >= tail_start) & (x <= hi), (x <= -tail_start) & (x >= lo)):
        if mask.sum() < 8:
            raise ValueError("fewer than 8 points on a tail")
        if np.any(w[mask] <= 0.0):
            raise ValueError("vanishing amplitude on the fitted range")
        fits.append(_ols(x[mask].astype(float), np.log(w[mask])))
    (sp, rp), (sm, rm) = fits
    return DecayFit(sp, sm, rp, rm, int(tail_start))


@dataclass(frozen=True)
class BirthReport:
    sign: int
    ratios: SideRatios
    B: float
    b_paper: float
    verdict: Verdict
    residual: Optional[float] = None
    decay: Optional[DecayFit] = None
    predicted_slope_plus: Optional[float] = None
    predicted_slope_minus: Optional[float] = None
    eigenvector: Optional[State] = field(default=None, compare=False, repr=False)

    def to_dict(self) -> dict:
        """JSON-ready summary; the eigenvector itself is written separately."""
        return {
            "sign": self.sign,
            "ratios": self.ratios.to_dict(),
            "B": self.B,
            "b_paper": self.b_paper,
            "verdict": self.verdict.value,
            "residual": self.residual,
            "decay": None if self.decay is None else self.decay.to_dict(),
            "predicted_slope_plus": self.predicted_slope_plus,
            "predicted_slope_minus": self.predicted_slope_minus,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BirthReport":
        return cls(
            sign=d["sign"],
            ratios=SideRatios.from_dict(d["ratios"]),
            B=d["B"],
            b_paper=d["b_paper"],
            verdict=Verdict(d["verdict"]),
            residual=d["residual"],
            decay=None if d["decay"] is None else DecayFit.from_dict(d["decay"]),
            predicted_slope_plus=d["predicted_slope_plus"],
            predicted_slope_minus=d["predicted_slope_minus"],
        )


def _fit_extent(psi: State, tail_start: int, floor: float = 1e-280) -> int:
    """Largest L <= window edge - EDGE with ||Psi(x)||^2 > floor for tail_start <= |x| <= L."""
    w = psi.site_norms2()
    L = tail_start
    limit = min(psi.x_max, -psi.x_min) - EDGE
    while L + 1 <= limit and w[L + 1 - psi.x_min] > floor and w[-(L + 1) - psi.x_min] > floor:
        L += 1
    return L


def birth_report(
    shift: ShiftParams,
    coins: CoinField,
    sign,
    window=(-200, 200),
    tail: int = 30,
    tail_start: int = 30,
    margin: float = MARGIN,
    tail_tol: float = 1e-10,
) -> BirthReport:
    """Ratios, verdict and, for a nontrivial space, the eigenvector with its residual and decay fit."""
    s = _sign(sign)
    ratios = side_ratios(shift, coins, s, tail)
    verdict = classify(ratios, margin)
    base = dict(sign=s, ratios=ratios, B=ratios.B, b_paper=ratios.b_paper, verdict=verdict)
    if verdict is not Verdict.NONTRIVIAL:
        return BirthReport(**base)
    vec = construct_eigenvector(shift, coins, s, window, tail_tol=tail_tol, margin=margin, tail=tail)
    residual = verify_eigenvector(shift, coins, vec, s)
    L = _fit_extent(vec, tail_start)
    decay = decay_fit(vec, tail_start, L) if L - tail_start + 1 >= 8 else None
    pred_plus = pred_minus = None
    if ratios.exact:
        pred_plus = math.log(ratios.plus_sup)
        pred_minus = -math.log(ratios.minus_sup)
    return BirthReport(
        **base,
        residual=residual,
        decay=decay,
        predicted_slope_plus=pred_plus,
        predicted_slope_minus=pred_minus,
        eigenvector=vec,
    )


def robustness_compare(
    shift: ShiftParams,
    coins: CoinField,
    coins_perturbed: CoinField,
    sign,
    window=(-200, 200),
    slope_rtol: float = 0.05,
    **kwargs,
) -> tuple[BirthReport, BirthReport]:
    """Run the pipeline on a coin field and on a perturbation vanishing at infinity."""
    for lim in ("limit_minus", "limit_plus"):
        c0, c1 = getattr(coins, lim), getattr(coins_perturbed, lim)
        if c0 is None or c1 is None or not c0.close_to(c1):
            raise ValueError("not a vanishing perturbation: declared limits differ")
    r0 = birth_report(shift, coins, sign, window, **kwargs)
    r1 = birth_report(shift, coins_perturbed, sign, window, **kwargs)
    if r0.verdict is not r1.verdict:
        raise RobustnessViolation(f"verdicts differ: {r0.verdict.value} vs {r1.verdict.value}")
    if r0.decay is not None and r1.decay is not None:
        for a, b in ((r0.decay.slope_plus, r1.decay.slope_plus), (r0.decay.slope_minus, r1.decay.slope_minus)):
            if abs(a - b) > slope_rtol * abs(a):
                raise RobustnessViolation(f"decay slopes differ beyond {slope_rtol:.0%}: {a} vs {b}")
    return r0, r1
