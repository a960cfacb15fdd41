"""Spectral analysis of one-dimensional split-step quantum walks U = SC."""

from .birth import (
    BirthReport,
    DecayFit,
    SideRatios,
    Verdict,
    beta_constants,
    birth_report,
    classify,
    construct_eigenvector,
    decay_fit,
    robustness_compare,
    side_ratios,
    verify_eigenvector,
)
from .discriminant import (
    SpectrumReport,
    TruncatedOperator,
    build_K_E,
    build_T,
    build_U,
    eig_hermitian,
    eig_unitary,
    exclusion_bound,
    spectral_mapping_check,
    v_of,
)
from .errors import BirthSpaceTrivial, BoundaryCase, HypothesisViolation, NonUnitaryTruncation, WindowTooSmall
from .kernels import BACKEND
from .lattice import (
    SIGMA1,
    CoinField,
    CoinSite,
    ScalarField,
    ShiftParams,
    State,
    apply_C,
    apply_S,
    chi_of,
    d_apply,
    d_star_apply,
)
from .models import (
    AnisotropicSpec,
    KitagawaSpec,
    anisotropic_coin,
    epsilon0,
    kitagawa_coin,
    predict_theorem_6_1,
    predict_theorem_6_2,
)
from .walk import evolve, local_matrices, position_distribution, step

__all__ = [
    "BirthReport",
    "DecayFit",
    "SideRatios",
    "Verdict",
    "beta_constants",
    "birth_report",
    "classify",
    "construct_eigenvector",
    "decay_fit",
    "robustness_compare",
    "side_ratios",
    "verify_eigenvector",
    "SpectrumReport",
    "TruncatedOperator",
    "build_K_E",
    "build_T",
    "build_U",
    "eig_hermitian",
    "eig_unitary",
    "exclusion_bound",
    "spectral_mapping_check",
    "v_of",
    "BirthSpaceTrivial",
    "BoundaryCase",
    "HypothesisViolation",
    "NonUnitaryTruncation",
    "WindowTooSmall",
    "BACKEND",
    "SIGMA1",
    "CoinField",
    "CoinSite",
    "ScalarField",
    "ShiftParams",
    "State",
    "apply_C",
    "apply_S",
    "chi_of",
    "d_apply",
    "d_star_apply",
    "AnisotropicSpec",
    "KitagawaSpec",
    "anisotropic_coin",
    "epsilon0",
    "kitagawa_coin",
    "predict_theorem_6_1",
    "predict_theorem_6_2",
    "evolve",
    "local_matrices",
    "position_distribution",
    "step",
]

__version__ = "0.1.0"
