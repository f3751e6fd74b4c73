import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from alphacone.calib import (
    GridSpec,
    Q_value,
    ReducedPoint,
    band_mask,
    cone_angle,
    div_xi_closed,
    div_xi_numeric,
    F_explicit,
    grad_norm,
    richardson_slope,
    subcalibration_report,
    xi_plus,
)
from alphacone.conepolys import ConeParams, build_Q, subcal_bound_test

CASES = [(2, 11), (3, 6), (7, 2)]


def _grid(n=50, band=0.05, m=2, a=11):
    r = np.linspace(0.1, 2.0, n)
    R, Y = np.meshgrid(r, r, indexing="ij")
    R, Y = R.ravel(), Y.ravel()
    keep = band_mask(m, a, R, Y, band)
    return R[keep], Y[keep]


def _smallest_integer_alpha(m):
    a = 1
    while not subcal_bound_test(ConeParams(m, a)):
        a += 1
    return a


points = st.tuples(
    st.floats(min_value=0.05, max_value=5.0), st.floats(min_value=0.05, max_value=5.0)
)


def test_reduced_point_validation():
    ReducedPoint(1.0, 2.0)
    with pytest.raises(ValueError):
        ReducedPoint(0.0, 1.0)


def test_grid_validation():
    with pytest.raises(ValueError):
        GridSpec(radial=(2.0, 1.0))
    with pytest.raises(ValueError):
        GridSpec(band=-1)
    r, y = GridSpec(n_radial=3, n_height=4).points()
    assert r.shape == y.shape == (12,)


# -- F and its gradient ----------------------------------------------------------------


def test_F_examples():
    assert F_explicit(2, 1, 1.0, 1.0) == 0.0
    assert F_explicit(2, 4, 1.0, 1.0) == pytest.approx(15 / 4)
    th = cone_angle(3, 5)
    assert F_explicit(3, 5, math.cos(th), math.sin(th)) == pytest.approx(0.0, abs=1e-14)


def test_grad_norm_examples():
    assert grad_norm(2, 1, 1.0, 1.0) == pytest.approx(math.sqrt(2))


@given(points, st.sampled_from([0.5, 2.0, 3.7]))
def test_grad_norm_homogeneous(pt, lam):
    r, y = pt
    assert grad_norm(3, 2.5, lam * r, lam * y) == pytest.approx(lam**3 * grad_norm(3, 2.5, r, y), rel=1e-13)
    assert grad_norm(3, 2.5, r, y) > 0


@given(points, st.sampled_from(CASES))
def test_xi_norm_is_weight(pt, case):
    m, a = case
    r, y = pt
    xr, xy = xi_plus(m, a, r, y)
    assert math.hypot(xr, xy) == pytest.approx(y**a, rel=1e-14)


# -- divergence ------------------------------------------------------------------------


def test_div_on_cone_vanishes():
    for m, a in CASES:
        th = cone_angle(m, a)
        assert abs(div_xi_closed(m, a, math.cos(th), math.sin(th))) < 1e-12


def test_div_sign_below_cone_example():
    assert div_xi_closed(2, 11, 1.0, 0.5) <= 0


def test_div_flips_across_cone():
    m, a = 2, 11
    th = cone_angle(m, a)
    for d in (0.02, 0.1, 0.3):
        below = div_xi_closed(m, a, math.cos(th - d), math.sin(th - d))
        above = div_xi_closed(m, a, math.cos(th + d), math.sin(th + d))
        ratio = math.tan(th - d) ** 2, math.tan(th + d) ** 2
        if Q_value(m, a, ratio[0]) > 0 and Q_value(m, a, ratio[1]) > 0:
            assert below < 0 < above


@pytest.mark.parametrize("m, a", CASES)
def test_divergence_identity(m, a):
    R, Y = _grid(m=m, a=a)
    closed = div_xi_closed(m, a, R, Y)
    numeric = div_xi_numeric(m, a, R, Y)
    assert np.max(np.abs(numeric - closed) / np.abs(closed)) < 1e-6


@pytest.mark.parametrize("m, a", [(3, 6), (7, 2)])
def test_divergence_identity_step_1e5(m, a):
    R, Y = _grid(m=m, a=a)
    closed = div_xi_closed(m, a, R, Y)
    numeric = div_xi_numeric(m, a, R, Y, h=1e-5)
    assert np.max(np.abs(numeric - closed) / np.abs(closed)) < 1e-6


@pytest.mark.parametrize("m, a", CASES)
@pytest.mark.parametrize("h", [1e-2, 1e-3])
def test_second_order_convergence(m, a, h):
    R, Y = _grid(m=m, a=a)
    assert 1.8 <= richardson_slope(m, a, R, Y, h) <= 2.2


@given(points, st.sampled_from(CASES))
def test_Q_factor_matches_exact(pt, case):
    m, a = case
    r, y = pt
    ratio = y * y / (r * r)
    exact = float(build_Q(ConeParams(m, a))(Fraction(ratio)))
    assert Q_value(m, a, ratio) == pytest.approx(exact, rel=1e-12, abs=1e-12 * a**4)


@given(points, st.sampled_from(CASES), st.sampled_from([0.5, 2.0]))
def test_div_homogeneity(pt, case, lam):
    m, a = case
    r, y = pt
    if min(abs(math.atan2(y, r) - cone_angle(m, a)), math.atan2(y, r), math.atan2(r, y)) < 1e-3:
        return
    d1 = div_xi_closed(m, a, r, y)
    d2 = div_xi_closed(m, a, lam * r, lam * y)
    assert d2 == pytest.approx(lam ** (a - 1) * d1, rel=1e-10)


def test_band_mask_excludes_cone_and_axes():
    m, a = 3, 6
    th = cone_angle(m, a)
    ang = np.array([0.01, th - 0.02, th + 0.02, th - 0.2, math.pi / 2 - 0.01])
    keep = band_mask(m, a, np.cos(ang), np.sin(ang), 0.05)
    assert keep.tolist() == [False, False, False, True, False]


# -- report ----------------------------------------------------------------------------


def test_report_passes_above_bound():
    rep = subcalibration_report(2, 11)
    assert rep.max_div_inside <= 1e-10
    assert rep.max_div_outside <= 1e-10
    assert rep.norm_bound_ok
    assert rep.boundary_alignment_err < 1e-6
    assert rep.passed


def test_report_fails_below_bound():
    rep = subcalibration_report(2, 4)
    assert rep.max_div_inside > 0
    assert not rep.passed
    r, y = rep.worst_inside
    assert div_xi_closed(2, 4, r, y) == pytest.approx(rep.max_div_inside)


@pytest.mark.parametrize("m", range(2, 13))
def test_sign_theorem_sweep(m):
    a = _smallest_integer_alpha(m)
    rep = subcalibration_report(m, a)
    assert rep.max_div_inside <= 1e-10
    assert rep.max_div_outside <= 1e-10
    assert rep.passed


def test_sweep_alphas():
    assert [_smallest_integer_alpha(m) for m in range(2, 13)] == [11, 5, 3, 3, 2, 2, 2, 2, 2, 2, 1]


def test_min_div_outside_is_reported():
    rep = subcalibration_report(3, 6)
    assert rep.min_div_outside <= rep.max_div_outside
    assert rep.n_inside > 0 and rep.n_outside > 0
