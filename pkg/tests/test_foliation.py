import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alphacone.alpham import gamma_window
from alphacone.conepolys import ConeParams, build_P
from alphacone.foliation import (
    ABOVE,
    BELOW,
    AngleNearCone,
    AtPole,
    FoliationConfig,
    NoAdmissibleGamma,
    NotBelowOne,
    F_bold,
    build_v,
    certified_config,
    coef_K,
    euler_lagrange_residual,
    foliate,
    g_prime,
    g_upper,
    integrate_w,
    level_curve,
    lower_solution_defect,
    ode_residual,
    quad_margin,
    rhs_H,
    t_hat,
    t_hat_arccos,
)

rng = np.random.default_rng(12345)


@pytest.fixture(scope="module")
def fol34():
    return foliate(certified_config(3, 4))


def _branch_ts(m, a, branch, n, margin=1e-3):
    th = t_hat(m, a)
    lo, hi = (margin, th - margin) if branch == BELOW else (th + margin, math.pi / 2 - margin)
    return rng.uniform(lo, hi, n)


# -- closed forms ----------------------------------------------------------------


def test_t_hat_examples():
    assert t_hat(2, 1) == pytest.approx(math.pi / 4, abs=1e-15)
    assert t_hat(5, 4) == pytest.approx(math.pi / 4, abs=1e-15)
    assert t_hat(3, 4) == pytest.approx(math.atan(math.sqrt(2)), abs=1e-15)
    assert abs(t_hat(3, 4) - 0.9553166) < 1e-7


def test_t_hat_forms_agree_on_grid():
    for m in np.linspace(2, 40, 20):
        for a in np.linspace(0.05, 30, 20):
            assert t_hat_arccos(m, a) == pytest.approx(t_hat(m, a), rel=1e-14)


@pytest.mark.parametrize("m, a", [(3, 4), (5, 2), (2, 6), (7, 1.5)])
@pytest.mark.parametrize("branch", [BELOW, ABOVE])
def test_g_is_zero_of_H(m, a, branch):
    t = _branch_ts(m, a, branch, 20)
    g = g_upper(m, a, t)
    # H vanishes through its second factor; scale by 1 + g^2 to keep it relative
    assert np.max(np.abs(rhs_H(m, a, t, g)) / (1 + g * g)) < 1e-12


def test_g_vanishes_at_zero():
    assert abs(g_upper(3, 4, 1e-9)) < 1e-8
    # denominator at t = 0 is 2 alpha
    assert g_upper(3, 4, 1e-9) / (2e-9) == pytest.approx((3 + 4) / (2 * 4), rel=1e-6)


@pytest.mark.parametrize("m, a", [(3, 4), (5, 2), (2, 6), (10, 0.6)])
@pytest.mark.parametrize("branch", [BELOW, ABOVE])
def test_g_nondecreasing(m, a, branch):
    t = np.sort(_branch_ts(m, a, branch, 200))
    g = g_upper(m, a, t)
    assert np.all(np.diff(g) >= 0)
    assert np.all(g_prime(m, a, t) >= 0)
    h = 1e-6
    fd = (g_upper(m, a, t + h) - g_upper(m, a, t - h)) / (2 * h)
    assert np.allclose(fd, g_prime(m, a, t), rtol=1e-6)


def test_g_raises_at_pole():
    with pytest.raises(AtPole):
        g_upper(3, 4, t_hat(3, 4))
    with pytest.raises(AtPole):
        g_upper(3, 4, t_hat(3, 4) + 1e-7, eps=1e-6)


def test_rhs_examples():
    t = 0.3
    assert rhs_H(3, 4, t, 0.0) == pytest.approx(7.0)
    assert rhs_H(3, 4, t, g_upper(3, 4, t)) == pytest.approx(0.0, abs=1e-12)
    th = t_hat(3, 4)
    assert rhs_H(3, 4, th, 0.0) == pytest.approx(7.0)
    assert abs(coef_K(3, 4, th)) < 1e-12


# -- quad margin ------------------------------------------------------------------


@settings(max_examples=50, deadline=None)
@given(
    st.integers(2, 20),
    st.fractions(min_value=Fraction(1, 10), max_value=20, max_denominator=50),
    st.fractions(min_value=Fraction(1, 1000), max_value=Fraction(999, 1000), max_denominator=1000),
)
def test_margin_sign_matches_quartic(m, a, frac):
    params = ConeParams(m, a)
    gamma = frac * (1 - 1 / params.s)
    *_, margin = quad_margin(m, a, gamma)
    assert (margin >= 0) == (build_P(params)(gamma) >= 0)


def test_margin_a_vanishes_at_window_end():
    m, a = 3, 4.0
    end = 1 - 1 / (m + a)
    a_vals = [quad_margin(m, a, end - d)[0] for d in (1e-2, 1e-4, 1e-6)]
    assert all(v > 0 for v in a_vals)
    assert a_vals[0] > a_vals[1] > a_vals[2]
    assert a_vals[2] < 1e-4


def test_margin_equality_at_stability_floor():
    m = (5 + math.sqrt(8)) / 2  # alpha = m - 1 and m + alpha = 4 + sqrt(8)
    a = m - 1
    assert (1 - 0.5) * 0.5 == pytest.approx(2 * (m + a - 1) / (m + a) ** 2, rel=1e-14)
    *_, margin = quad_margin(m, a, 0.5)
    assert margin == pytest.approx(0.0, abs=1e-12)


def test_margin_rejects_gamma_out_of_range():
    with pytest.raises(NotBelowOne):
        quad_margin(3, 4, 1.0)
    with pytest.raises(NotBelowOne):
        quad_margin(3, 4, 0)


@pytest.mark.parametrize("m, a", [(3, 4), (5, 2), (2, 6)])
@pytest.mark.parametrize("branch", [BELOW, ABOVE])
def test_lower_solution_inequality(m, a, branch):
    cfg = certified_config(m, a)
    t = _branch_ts(m, a, branch, 100)
    d = lower_solution_defect(m, a, cfg.gamma, t)
    g = g_upper(m, a, t)
    # defect is non-negative up to rounding relative to the size of H terms
    assert np.all(d >= -1e-9 * (1 + (cfg.gamma * g) ** 2) * (m + a))


# -- configuration -------------------------------------------------------------------


def test_config_validation():
    with pytest.raises(ValueError):
        FoliationConfig(3, 4.0, 0.5, eps=0.5)
    with pytest.raises(NotBelowOne):
        FoliationConfig(3, 4.0, 0.99)


def test_certified_config_gamma_exact():
    cfg = certified_config(3, 4)
    params = ConeParams(3, Fraction(cfg.alpha))
    assert build_P(params)(Fraction(cfg.gamma)) >= 0
    win = gamma_window(params)
    assert win.window.lo <= Fraction(cfg.gamma) <= win.window.hi


def test_certified_config_below_alpha_m():
    with pytest.raises(NoAdmissibleGamma):
        certified_config(2, 5)


# -- integration -----------------------------------------------------------------------


def test_containment_every_step(fol34):
    for sol in (fol34.below, fol34.above):
        assert sol.containment_fraction == 1.0
        assert sol.accepted_inside.all()


def test_samples_between_barriers(fol34):
    cfg = fol34.cfg
    for sol in (fol34.below, fol34.above):
        far = np.abs(sol.t_samples - cfg.t_hat) > 1e-3
        t, w = sol.t_samples[far], sol.w_samples[far]
        g = g_upper(cfg.m, cfg.alpha, t)
        lo, hi = np.minimum(cfg.gamma * g, g), np.maximum(cfg.gamma * g, g)
        slack = 1e-9 * np.abs(g)
        assert np.all((lo - slack <= w) & (w <= hi + slack))
        if sol.branch == BELOW:
            assert np.all(w > 0)
        else:
            assert np.all(w < 0)


def test_pole_crossing(fol34):
    cfg = fol34.cfg
    for sol in (fol34.below, fol34.above):
        assert abs(sol.pole_crossing - cfg.t_hat) < cfg.eps
        assert sol.switch_t is not None
        u_end = sol.u_samples[-1] if sol.branch == BELOW else sol.u_samples[0]
        assert abs(u_end) < 1e-3


@pytest.mark.parametrize("eps", [1e-3, 1e-4])
def test_w_small_near_origin(eps):
    cfg = certified_config(3, 4, eps=eps, n=401)
    sol = integrate_w(cfg, BELOW)
    w = float(sol.w_at(eps)[0])
    assert abs(w) < 10 * cfg.gamma * g_upper(3, 4, eps)


def test_residuals(fol34):
    for sol in (fol34.below, fol34.above):
        assert ode_residual(sol) < 1e-8
        assert euler_lagrange_residual(sol) < 1e-5


def test_v_monotone(fol34):
    b, a = fol34.below, fol34.above
    assert np.all(np.diff(b.v_samples) > 0)
    # above the cone w < 0, so v decreases as t increases
    assert np.all(np.diff(a.v_samples) < 0)
    dv = np.gradient(a.v_samples, a.t_samples)
    assert np.all(np.sign(dv[5:-5]) == np.sign(a.w_samples[5:-5]))


def test_v_normalised_at_outer_end(fol34):
    # v vanishes at t = 0 and pi/2; the truncated end carries eps * w / 2
    b, a = fol34.below, fol34.above
    assert abs(b.v_samples[0]) < 1e-8
    assert abs(a.v_samples[-1]) < 1e-8
    assert b.quad_error < 1e-5 and a.quad_error < 1e-5


def test_build_v_required():
    cfg = certified_config(3, 4, n=201)
    sol = integrate_w(cfg, BELOW)
    with pytest.raises(ValueError):
        euler_lagrange_residual(sol)
    assert build_v(sol).v_samples is not None


# -- level curves and F --------------------------------------------------------------


def test_level_curve_positive_and_inside(fol34):
    r, y = level_curve(fol34.below, 1.0)
    assert np.all(r > 0) and np.all(y > 0)
    assert np.all(y / r < math.tan(fol34.cfg.t_hat))
    r, y = level_curve(fol34.above, 1.0)
    assert np.all(y / r > math.tan(fol34.cfg.t_hat))


@pytest.mark.parametrize("lam", [0.5, 2.0, 7.25])
def test_level_curve_homogeneous(fol34, lam):
    for sol in (fol34.below, fol34.above):
        r1, y1 = level_curve(sol, 1.0)
        rl, yl = level_curve(sol, lam)
        assert np.allclose(rl, lam * r1, rtol=1e-14, atol=0)
        assert np.allclose(yl, lam * y1, rtol=1e-14, atol=0)


def test_level_curve_rejects_bad_lambda(fol34):
    with pytest.raises(ValueError):
        level_curve(fol34.below, 0.0)


def test_F_constant_on_leaf(fol34):
    for sol, sign in ((fol34.below, 1.0), (fol34.above, -1.0)):
        r, y = level_curve(sol, 1.3)
        keep = np.abs(np.arctan2(y, r) - fol34.cfg.t_hat) > 1e-3
        vals = F_bold(fol34, r[keep], y[keep])
        assert np.allclose(vals, sign * 1.3, rtol=1e-9)


def test_F_sign_and_homogeneity(fol34):
    th = fol34.cfg.t_hat
    ang = np.concatenate([rng.uniform(0.01, th - 0.01, 50), rng.uniform(th + 0.01, 1.56, 50)])
    rad = rng.uniform(0.2, 3.0, 100)
    r, y = rad * np.cos(ang), rad * np.sin(ang)
    F = F_bold(fol34, r, y)
    assert np.all(np.sign(F) == np.sign(math.tan(th) - y / r))
    for lam in (0.5, 2.0):
        assert np.allclose(F_bold(fol34, lam * r, lam * y), lam * F, rtol=1e-12)


def test_F_rejects_cone(fol34):
    th = fol34.cfg.t_hat
    with pytest.raises(AngleNearCone):
        F_bold(fol34, math.cos(th), math.sin(th))
