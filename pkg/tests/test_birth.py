import math

import numpy as np
import pytest

from oracles import kitagawa_beta, random_coin_field, random_shift, random_state
from speclab import (
    SIGMA1,
    BirthSpaceTrivial,
    CoinField,
    ShiftParams,
    SideRatios,
    State,
    Verdict,
    beta_constants,
    birth_report,
    build_U,
    classify,
    construct_eigenvector,
    decay_fit,
    eig_unitary,
    robustness_compare,
    side_ratios,
    verify_eigenvector,
)
from speclab.birth import BirthReport, RobustnessViolation
from speclab.errors import HypothesisViolation, WindowTooSmall
from speclab.models import AnisotropicSpec, KitagawaSpec, anisotropic_coin, anisotropic_limits, g, kitagawa_coin, rotate_chi

FLIP = ShiftParams(0.0, 1.0)
ANISO_03 = anisotropic_coin(AnisotropicSpec(0.3))


def _ratios(m_sup, m_inf, p_sup, p_inf):
    return SideRatios(1, m_sup, m_inf, p_sup, p_inf)


def test_classify_examples():
    assert classify(_ratios(0.3, 0.3, 0.5, 0.5)) is Verdict.NONTRIVIAL
    assert classify(_ratios(1.2, 1.2, 1.5, 1.5)) is Verdict.TRIVIAL
    assert classify(_ratios(0.5, 0.5, 1.05, 0.9)) is Verdict.INCONCLUSIVE
    # one divergent side suffices
    assert classify(_ratios(0.2, 0.2, 1.5, 1.5)) is Verdict.TRIVIAL
    assert classify(_ratios(0.2, 0.2, 1.0, 1.0)) is Verdict.INCONCLUSIVE


def test_side_ratios_anisotropic():
    for s in (1, -1):
        r = side_ratios(FLIP, anisotropic_coin(AnisotropicSpec(0.5)), s)
        assert r.exact
        for v in (r.minus_sup, r.minus_inf, r.plus_sup, r.plus_inf):
            assert v == pytest.approx(1 / 3, abs=1e-14)


def test_side_ratios_balanced_constant():
    r = side_ratios(FLIP, CoinField.constant(SIGMA1), 1)
    assert r.B == pytest.approx(1.0, abs=1e-14) and r.b_paper == pytest.approx(1.0, abs=1e-14)
    assert classify(r) is Verdict.INCONCLUSIVE


def test_side_ratios_kitagawa_worked_point():
    shift, coins = kitagawa_coin(KitagawaSpec(-math.pi / 3, 3 * math.pi / 2, 0.0))
    r = side_ratios(shift, coins, 1)
    lo, hi = kitagawa_beta(3 * math.pi / 2, 0.0, -math.pi / 3, 1)
    assert r.minus_sup == pytest.approx(lo, abs=1e-12) and round(r.minus_sup, 4) == 0.5147
    assert r.plus_sup == pytest.approx(1 / 3, abs=1e-12) == pytest.approx(hi, abs=1e-12)


def test_side_ratios_undeclared_limits_use_tail_window():
    rng = np.random.default_rng(31)
    coins = random_coin_field(rng, limits=False)
    r = side_ratios(random_shift(rng), coins, -1)
    assert not r.exact
    assert r.minus_inf <= r.minus_sup and r.plus_inf <= r.plus_sup
    # nearest-site fill makes each undeclared side constant
    assert r.minus_inf == pytest.approx(r.minus_sup) and r.plus_inf == pytest.approx(r.plus_sup)


def test_side_ratios_hypothesis_violation():
    from speclab import CoinSite

    coins = CoinField.from_sites(-1, [SIGMA1, CoinSite(-1.0, 0.0), SIGMA1], SIGMA1, SIGMA1)
    with pytest.raises(HypothesisViolation) as err:
        side_ratios(FLIP, coins, 1)
    assert err.value.site == 0 and "0" in str(err.value)


def test_beta_constants_anisotropic_p_half():
    eps = 0.4
    cm, cp = anisotropic_limits(eps)
    r = beta_constants(ShiftParams.from_p(0.5), cm, cp, 1)
    assert r.minus_sup == pytest.approx(g(eps) / 3, rel=1e-13)
    assert r.plus_sup == pytest.approx(3 * g(eps), rel=1e-13)
    r = beta_constants(ShiftParams.from_p(0.5), cm, cp, -1)
    assert r.minus_sup == pytest.approx(3 * g(eps), rel=1e-13)


def test_beta_constants_symmetric_limits():
    r = beta_constants(FLIP, SIGMA1, SIGMA1, 1)
    assert (r.minus_sup, r.plus_sup) == pytest.approx((1.0, 1.0), abs=1e-14)


def test_beta_constants_kitagawa_against_closed_form():
    rng = np.random.default_rng(32)
    done = 0
    while done < 20:
        tm, tp = rng.uniform(0, 2 * math.pi, 2)
        t2 = rng.uniform(-2 * math.pi, 2 * math.pi)
        # the closed form loses digits to cancellation as theta -> pi, where b(x) -> 0
        if min(abs(tm - math.pi), abs(tp - math.pi), abs(abs(t2) - math.pi)) < 0.05:
            continue
        shift, coins = kitagawa_coin(KitagawaSpec(t2, tm, tp))
        for s in (1, -1):
            r = beta_constants(shift, coins.limit_minus, coins.limit_plus, s)
            lo, hi = kitagawa_beta(tm, tp, t2, s)
            assert r.minus_sup == pytest.approx(lo, rel=1e-12, abs=1e-12)
            assert r.plus_sup == pytest.approx(hi, rel=1e-12, abs=1e-12)
            assert side_ratios(shift, coins, s) == r
        done += 1


def test_beta_constants_reject_degenerate_limit():
    from speclab import CoinSite

    with pytest.raises(ValueError, match="chi_1 chi_2"):
        beta_constants(FLIP, CoinSite(1.0, 0.0), SIGMA1, 1)


@pytest.mark.parametrize("sign", [1, -1])
def test_construct_and_verify_anisotropic(sign):
    vec = construct_eigenvector(FLIP, ANISO_03, sign, (-200, 200))
    assert vec.norm() == pytest.approx(1.0, abs=1e-14)
    assert verify_eigenvector(FLIP, ANISO_03, vec, sign) <= 1e-12
    # wrong sign is far from an eigenvector
    assert verify_eigenvector(FLIP, ANISO_03, vec, -sign) > 0.5


def test_construct_trivial_raises():
    with pytest.raises(BirthSpaceTrivial, match="trivial or inconclusive"):
        construct_eigenvector(FLIP, CoinField.constant(SIGMA1), 1)


def test_window_too_small():
    with pytest.raises(WindowTooSmall, match="enlarge the window"):
        construct_eigenvector(FLIP, anisotropic_coin(AnisotropicSpec(0.6)), 1, (-10, 10))


def test_seed_does_not_matter():
    a = construct_eigenvector(FLIP, ANISO_03, 1, (-100, 100), seed=1.0)
    b = construct_eigenvector(FLIP, ANISO_03, 1, (-100, 100), seed=2.0)
    phase = np.vdot(a.values.ravel(), b.values.ravel())
    assert abs(abs(phase) - 1) <= 1e-12
    assert np.max(np.abs(b.values - phase * a.values)) <= 1e-12


def test_verify_random_and_zero():
    rng = np.random.default_rng(33)
    sh, coins = random_shift(rng), random_coin_field(rng)
    assert verify_eigenvector(sh, coins, random_state(rng, -10, 10), 1) > 0.1
    assert verify_eigenvector(sh, coins, State.zeros(-5, 5), 1) == math.inf


def test_decay_fit_exact_geometric():
    beta = 0.37
    x = np.arange(-40, 41)
    w = beta ** np.abs(x)
    psi = State(-40, np.stack([np.sqrt(w), np.zeros_like(w)], axis=1))
    fit = decay_fit(psi, 10)
    assert fit.slope_plus == pytest.approx(math.log(beta), rel=1e-12)
    assert fit.slope_minus == pytest.approx(-math.log(beta), rel=1e-12)
    assert fit.r2_plus == pytest.approx(1.0, abs=1e-12) and fit.r2_minus == pytest.approx(1.0, abs=1e-12)


def test_decay_fit_too_few_points():
    psi = State(-12, np.ones((25, 2)))
    with pytest.raises(ValueError, match="fewer than 8"):
        decay_fit(psi, 5)


def test_birth_report_decay_anisotropic():
    target = math.log(0.09 / 0.91)
    for s in (1, -1):
        rep = birth_report(FLIP, ANISO_03, s)
        assert rep.verdict is Verdict.NONTRIVIAL and rep.residual <= 1e-8
        assert rep.decay.slope_plus == pytest.approx(target, rel=0.02)
        assert rep.decay.slope_minus == pytest.approx(-target, rel=0.02)
        assert min(rep.decay.r2_plus, rep.decay.r2_minus) >= 0.999
        assert rep.predicted_slope_plus == pytest.approx(target, rel=1e-12)


def test_birth_report_trivial_has_no_vector():
    rep = birth_report(FLIP, anisotropic_coin(AnisotropicSpec(0.9)), 1)
    assert rep.verdict is Verdict.TRIVIAL
    assert rep.eigenvector is None and rep.residual is None and rep.decay is None


def test_birth_report_dict_round_trip():
    rep = birth_report(FLIP, ANISO_03, -1)
    assert BirthReport.from_dict(rep.to_dict()) == rep


def test_robustness_vanishing_perturbation():
    pert = rotate_chi(ANISO_03, lambda x: 0.3 * 2.0 ** (-np.abs(x)), -20, 20)
    for s in (1, -1):
        r0, r1 = robustness_compare(FLIP, ANISO_03, pert, s)
        assert r0.verdict is r1.verdict is Verdict.NONTRIVIAL
        assert r1.residual <= 1e-8
        assert r1.decay.slope_plus == pytest.approx(r0.decay.slope_plus, rel=0.05)


def test_robustness_identical_and_trivial():
    r0, r1 = robustness_compare(FLIP, ANISO_03, ANISO_03, 1)
    assert r0.to_dict() == r1.to_dict()
    hi = anisotropic_coin(AnisotropicSpec(0.9))
    r0, r1 = robustness_compare(FLIP, hi, rotate_chi(hi, lambda x: 0.1 / (1 + x * x), -5, 5), 1)
    assert r0.verdict is r1.verdict is Verdict.TRIVIAL


def test_robustness_rejects_different_limits():
    with pytest.raises(ValueError, match="not a vanishing perturbation"):
        robustness_compare(FLIP, ANISO_03, anisotropic_coin(AnisotropicSpec(0.31)), 1)


def test_robustness_slope_check_raises():
    # a finite perturbation keeps the verdict; a negative tolerance forces the slope check to trip
    coins = CoinField.from_sites(0, [SIGMA1], ANISO_03.limit_minus, ANISO_03.limit_plus)
    r0, r1 = robustness_compare(FLIP, ANISO_03, coins, 1)
    assert r0.verdict is r1.verdict
    with pytest.raises(RobustnessViolation):
        robustness_compare(FLIP, ANISO_03, coins, 1, slope_rtol=-1.0)


def test_phase_invariance():
    rng = np.random.default_rng(34)
    phased = ANISO_03.with_chi_phase(lambda x: np.exp(1j * rng.uniform(0, 2 * math.pi, size=np.shape(x))))
    fixed = ANISO_03.with_chi_phase(lambda x: np.exp(1j * np.cos(2.3 * np.asarray(x) + 0.4)))
    for coins in (fixed, phased):
        for s in (1, -1):
            a, b = birth_report(FLIP, ANISO_03, s), birth_report(FLIP, coins, s)
            da, db = a.to_dict(), b.to_dict()
            for key in ("B", "b_paper", "predicted_slope_plus", "predicted_slope_minus"):
                assert db[key] == pytest.approx(da[key], abs=1e-12)
            for key, v in da["ratios"].items():
                assert db["ratios"][key] == pytest.approx(v, abs=1e-12)
            for key, v in da["decay"].items():
                assert db["decay"][key] == pytest.approx(v, abs=1e-12)
            assert b.residual <= 1e-12
    ra, rb = side_ratios(FLIP, phased, 1).to_dict(), side_ratios(FLIP, ANISO_03, 1).to_dict()
    for key, v in ra.items():
        assert rb[key] == pytest.approx(v, abs=1e-12)


@pytest.mark.parametrize("sign", [1, -1])
def test_verdict_matches_ring_spectrum(sign):
    n = 80
    x_min = -(n // 2)
    rep = eig_unitary(build_U(FLIP, ANISO_03, (x_min, x_min + n - 1)))
    near = np.abs(rep.eigenvalues - sign) <= 1e-6
    assert near.any()
    vec = construct_eigenvector(FLIP, ANISO_03, sign, (x_min, x_min + n - 1), tail_tol=1e-6)
    hits = [j for j in np.flatnonzero(near) if not rep.edge_flags[j]]
    assert hits
    overlap = max(abs(np.vdot(vec.values.ravel(), rep.eigenvectors[:, j])) for j in hits)
    assert overlap >= 1 - 1e-6
