"""
Truncations of the discriminant T = dSd* and of the evolution U = SC.

T is the Jacobi operator D + D* + V on l^2(Z) with D = q conj(chi_1) L chi_2
and V = p(|chi_1|^2 - |chi_2|^2).  Finite windows are cut either with hard
walls (dirichlet) or closed into a ring (periodic).  U is only truncated
periodically because a hard wall breaks unitarity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from .errors import NonUnitaryTruncation
from .lattice import CoinField, CoinSite, ShiftParams, _one_minus_a, chi_arrays, chi_of

__all__ = [
    "TruncatedOperator",
    "SpectrumReport",
    "v_of",
    "potential",
    "build_T",
    "build_U",
    "build_K_E",
    "eig_hermitian",
    "eig_unitary",
    "spectral_mapping_check",
    "exclusion_bound",
    "sup_abs_V",
]

BOUNDARIES = ("dirichlet", "periodic")
EDGE_SITES = 5


@dataclass(frozen=True, eq=False)
class TruncatedOperator:
    window: tuple[int, int]
    matrix: np.ndarray
    boundary: str
    kind: str  # "discriminant" or "evolution"

    @property
    def n_sites(self) -> int:
        return self.window[1] - self.window[0] + 1


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    """
    Eigenpairs of a truncated operator.

    ``edge_flags[j]`` marks eigenvectors with more than half their weight
    within ``EDGE_SITES`` sites of a cut (both ends of a dirichlet window, the
    seam of a periodic one).  For an evolution spectrum produced by
    :func:`spectral_mapping_check`, ``mapping_defects[j]`` is the distance from
    Re(lambda_j) to the nearest eigenvalue of T, ``reference`` holds the
    spectrum of T and ``inverse_defects[k]`` the distance from the farther of
    exp(±i arccos(lambda_T,k)) to the spectrum of U.
    """

    kind: str
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residuals: np.ndarray
    edge_flags: np.ndarray
    matrix_norm: float
    mapping_defects: Optional[np.ndarray] = None
    inverse_defects: Optional[np.ndarray] = None
    reference: Optional["SpectrumReport"] = None

    @property
    def max_mapping_defect(self) -> float:
        return float(np.max(self.mapping_defects)) if self.mapping_defects is not None else float("nan")

    @property
    def max_interior_defect(self) -> float:
        if self.mapping_defects is None:
            return float("nan")
        inner = self.mapping_defects[~self.edge_flags]
        return float(np.max(inner)) if inner.size else 0.0

    @property
    def max_inverse_defect(self) -> float:
        return float(np.max(self.inverse_defects)) if self.inverse_defects is not None else float("nan")


def v_of(shift: ShiftParams, coin: CoinSite) -> float:
    chi = chi_of(coin)
    return float(shift.p * (abs(chi[0]) ** 2 - abs(chi[1]) ** 2))


def potential(shift: ShiftParams, coins: CoinField, x_min: int, x_max: int) -> np.ndarray:
    # |chi_1|^2 - |chi_2|^2 = a, without the rounding of the normalized chi
    a, _ = coins.arrays(x_min, x_max)
    return shift.p * a


def _cross(a_x, b_x, a_y, b_y):
    """conj(chi_1(x)) chi_2(y) = conj(b_x)(1 - a_y) / (2 sqrt((1 - a_x)(1 - a_y)))."""
    om_x, om_y = _one_minus_a(a_x, b_x), _one_minus_a(a_y, b_y)
    prod = om_x * om_y
    good = prod > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.conj(b_x) * om_y / (2.0 * np.sqrt(np.where(good, prod, 1.0)))
    if not np.all(good):
        c1x, _ = chi_arrays(a_x, b_x)
        _, c2y = chi_arrays(a_y, b_y)
        out = np.where(good, out, np.conj(c1x) * c2y)
    return out


def sup_abs_V(shift: ShiftParams, coins: CoinField) -> float:
    """|V|_inf over the tabulated sites and the declared limits."""
    sup = float(np.max(np.abs(potential(shift, coins, coins.x0, coins.x1))))
    for coin in (coins.limit_minus, coins.limit_plus):
        if coin is not None:
            sup = max(sup, abs(v_of(shift, coin)))
    return sup


def _hopping(shift: ShiftParams, coins: CoinField, x_min: int, x_max: int, boundary: str) -> np.ndarray:
    """Matrix of D + D* on the window."""
    if boundary not in BOUNDARIES:
        raise ValueError(f"unknown boundary {boundary!r}")
    n = x_max - x_min + 1
    a, b = coins.arrays(x_min, x_max)
    ph = np.ones(n, dtype=complex)
    if coins.chi_phase is not None:
        ph = np.asarray(coins.chi_phase(np.arange(x_min, x_max + 1)), dtype=complex)
    D = np.zeros((n, n), dtype=complex)
    i = np.arange(n - 1)
    D[i, i + 1] = shift.q * _cross(a[:-1], b[:-1], a[1:], b[1:]) * np.conj(ph[:-1]) * ph[1:]
    if boundary == "periodic":
        # L wraps x_max onto x_min
        D[n - 1, 0] += shift.q * _cross(a[-1:], b[-1:], a[:1], b[:1])[0] * np.conj(ph[-1]) * ph[0]
    return D + D.conj().T


def _check_window(window) -> tuple[int, int]:
    x_min, x_max = int(window[0]), int(window[1])
    if x_max < x_min:
        raise ValueError("empty window")
    return x_min, x_max


def build_T(shift: ShiftParams, coins: CoinField, window, boundary: str = "dirichlet") -> TruncatedOperator:
    x_min, x_max = _check_window(window)
    if boundary == "periodic" and x_max - x_min + 1 < 3:
        raise ValueError("periodic truncation needs at least 3 sites")
    M = _hopping(shift, coins, x_min, x_max, boundary)
    M[np.diag_indices_from(M)] += potential(shift, coins, x_min, x_max)
    return TruncatedOperator((x_min, x_max), M, boundary, "discriminant")


def build_U(shift: ShiftParams, coins: CoinField, window, boundary: str = "periodic") -> TruncatedOperator:
    """Dense U = SC on a ring; basis index 2*(x - x_min) + component."""
    x_min, x_max = _check_window(window)
    if boundary != "periodic":
        raise NonUnitaryTruncation("non-unitary truncation: U is only truncated periodically")
    n = x_max - x_min + 1
    if n < 3:
        raise ValueError("window length must be at least 3")
    p, q = shift.p, shift.q
    S = np.zeros((2 * n, 2 * n), dtype=complex)
    for i in range(n):
        S[2 * i, 2 * i] = p
        S[2 * i, 2 * ((i + 1) % n) + 1] = q
        S[2 * i + 1, 2 * ((i - 1) % n)] = np.conj(q)
        S[2 * i + 1, 2 * i + 1] = -p
    a, b = coins.arrays(x_min, x_max)
    C = np.zeros((2 * n, 2 * n), dtype=complex)
    idx = 2 * np.arange(n)
    C[idx, idx] = a
    C[idx, idx + 1] = b
    C[idx + 1, idx] = np.conj(b)
    C[idx + 1, idx + 1] = -a
    return TruncatedOperator((x_min, x_max), S @ C, "periodic", "evolution")


def build_K_E(
    shift: ShiftParams,
    coins: CoinField,
    E: float,
    sign: int,
    window,
    boundary: str = "dirichlet",
) -> TruncatedOperator:
    """K_E^± = (E ∓ V)^{-1/2} (D + D*) (E ∓ V)^{-1/2} on a window."""
    x_min, x_max = _check_window(window)
    vinf = sup_abs_V(shift, coins)
    if E <= vinf + 1e-9:
        raise ValueError(f"square root of nonpositive weight: E = {E!r} <= |V|_inf = {vinf!r}")
    weight = E - np.sign(sign) * potential(shift, coins, x_min, x_max)
    scale = 1.0 / np.sqrt(weight)
    H = _hopping(shift, coins, x_min, x_max, boundary)
    return TruncatedOperator((x_min, x_max), scale[:, None] * H * scale[None, :], boundary, "discriminant")


def exclusion_bound(shift: ShiftParams, coins: CoinField) -> float:
    """|q| + |V|_inf; no eigenvalue of T exceeds it in modulus."""
    return abs(shift.q) + sup_abs_V(shift, coins)


def _edge_flags(site_weights: np.ndarray) -> np.ndarray:
    """site_weights: (n_sites, n_vectors) normalized per column."""
    n = site_weights.shape[0]
    w = min(EDGE_SITES, n // 8)
    if w == 0:
        return np.zeros(site_weights.shape[1], dtype=bool)
    mass = site_weights[:w].sum(axis=0) + site_weights[-w:].sum(axis=0)
    return mass > 0.5


def eig_hermitian(op: TruncatedOperator) -> SpectrumReport:
    M = op.matrix
    scale = max(1.0, float(np.max(np.abs(M))))
    if np.max(np.abs(M - M.conj().T)) > 1e-12 * scale:
        raise ValueError("matrix is not Hermitian")
    w, V = np.linalg.eigh(M)
    res = np.linalg.norm(M @ V - V * w, axis=0)
    flags = _edge_flags(np.abs(V) ** 2)
    return SpectrumReport("discriminant", w, V, res, flags, float(np.max(np.abs(w))) if w.size else 0.0)


def eig_unitary(op: TruncatedOperator) -> SpectrumReport:
    """Complex Schur form; for a normal matrix it is diagonal with orthonormal Z."""
    M = op.matrix
    k = M.shape[0]
    if np.max(np.abs(M.conj().T @ M - np.eye(k))) > 1e-10:
        raise ValueError("matrix is not unitary")
    Tm, Z = scipy.linalg.schur(M, output="complex")
    lam = np.diag(Tm).copy()
    order = np.lexsort((lam.imag, np.round(np.angle(lam), 12)))
    lam, Z = lam[order], Z[:, order]
    res = np.linalg.norm(M @ Z - Z * lam, axis=0)
    if op.kind == "evolution":
        weights = (np.abs(Z[0::2]) ** 2 + np.abs(Z[1::2]) ** 2)
    else:
        weights = np.abs(Z) ** 2
    flags = _edge_flags(weights)
    return SpectrumReport("evolution", lam, Z, res, flags, 1.0)


def _refined_cosines(op: TruncatedOperator, spec: SpectrumReport) -> np.ndarray:
    # Rayleigh quotients in extended precision: arccos amplifies a one-ulp
    # error at ±1 to ~1e-8, the quotient is exact to O(residual^2).
    M = op.matrix.astype(np.clongdouble)
    V = spec.eigenvectors.astype(np.clongdouble)
    num = np.einsum("ij,ij->j", V.conj(), M @ V).real
    den = np.einsum("ij,ij->j", V.conj(), V).real
    return np.clip(num / den, -1.0, 1.0)


def spectral_mapping_check(
    shift: ShiftParams,
    coins: CoinField,
    n_sites: int,
    x_min: Optional[int] = None,
) -> SpectrumReport:
    """
    Compare the spectra of U and T on a ring of ``n_sites`` sites.

    The ring is ``[x_min, x_min + n_sites - 1]``, centred on 0 by default.
    Forward defect: |Re lambda_U - nearest sigma(T)|.  Inverse defect: for
    each lambda_T both exp(±i arccos lambda_T) must be close to sigma(U).
    """
    if x_min is None:
        x_min = -(n_sites // 2)
    window = (x_min, x_min + n_sites - 1)
    T_op = build_T(shift, coins, window, "periodic")
    U_op = build_U(shift, coins, window, "periodic")
    t_spec = eig_hermitian(T_op)
    u_spec = eig_unitary(U_op)

    lam_T = t_spec.eigenvalues
    re_U = u_spec.eigenvalues.real
    forward = np.min(np.abs(re_U[:, None] - lam_T[None, :]), axis=1)

    theta = np.arccos(_refined_cosines(T_op, t_spec))
    targets = np.concatenate([np.exp(1j * theta), np.exp(-1j * theta)]).astype(np.complex128)
    dist = np.min(np.abs(targets[:, None] - u_spec.eigenvalues[None, :]), axis=1)
    k = lam_T.size
    inverse = np.maximum(dist[:k], dist[k:])

    return SpectrumReport(
        kind="evolution",
        eigenvalues=u_spec.eigenvalues,
        eigenvectors=u_spec.eigenvectors,
        residuals=u_spec.residuals,
        edge_flags=u_spec.edge_flags,
        matrix_norm=1.0,
        mapping_defects=forward,
        inverse_defects=inverse,
        reference=t_spec,
    )
