import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from selfrepel import (
    period_lower_bound,
    period_ode_oracle,
    period_quadrature,
    phi,
    phi_roots,
    rationality_report,
    x_displacement_check,
)
from selfrepel.period import (
    SQRT2_PI,
    QuadratureError,
    oracle_path,
    regularized_half_period,
    tanh_sinh,
)

TWO_SQRT2 = 2 * math.sqrt(2)

# values cross-checked against a 50-digit tanh-sinh evaluation during development
FROZEN_PERIODS = {
    0.6: 4.405950334847230,
    1.0: 4.261435612277768,
    2.0: 3.945922530414333,
    5.0: 3.474007948919799,
    20.0: 3.217727441722292,
    100.0: 3.157074984697906,
}


# ------------------------------------------------------------------ phi


def test_phi_values():
    assert phi(1.0) == 0.5
    assert phi(math.e) == pytest.approx(math.e**2 / 2 - 1, abs=1e-14)
    with pytest.raises(ValueError):
        phi(0.0)
    with pytest.raises(ValueError):
        phi(-1.0)


def test_phi_stationary_at_one():
    h = 1e-6
    assert (phi(1 + h) - phi(1 - h)) / (2 * h) == pytest.approx(0.0, abs=1e-6)


@given(a=st.floats(0.05, 8.0), b=st.floats(0.05, 8.0))
@settings(max_examples=100)
def test_phi_convex(a, b):
    mid = 0.5 * (a + b)
    assert phi(mid) <= 0.5 * (phi(a) + phi(b)) + 1e-12


# ------------------------------------------------------------------ roots


@pytest.mark.parametrize("c", [0.5001, 0.6, 1.0, 2.0, 5.0, 20.0, 100.0])
def test_phi_roots_residuals(c):
    c1, c2 = phi_roots(c)
    assert 0.0 < c1 < 1.0 < c2
    assert abs(phi(c1) - c) < 1e-13
    assert abs(phi(c2) - c) < 1e-13


def test_phi_roots_recovers_constructed_inverse():
    c = phi(2.0)
    _, c2 = phi_roots(c)
    assert c2 == pytest.approx(2.0, abs=1e-13)


def test_phi_roots_collapse_rate():
    # both roots approach 1 like sqrt(c - 1/2)
    for k in range(2, 7):
        c = 0.5 + 10.0 ** (-k)
        c1, c2 = phi_roots(c)
        scale = math.sqrt(c - 0.5)
        assert abs(1.0 - c1) / scale == pytest.approx(1.0, rel=0.05)
        assert (c2 - 1.0) / scale == pytest.approx(1.0, rel=0.05)


def test_phi_roots_domain():
    with pytest.raises(ValueError):
        phi_roots(0.5)
    with pytest.raises(ValueError):
        phi_roots(0.2)


# ------------------------------------------------------------- quadrature


def test_period_limit_near_minimum():
    res = period_quadrature(0.5001)
    assert abs(res.period - 4.442882938) < 1e-2
    assert res.method == "quadrature"
    assert res.err_estimate < 1e-9


@pytest.mark.parametrize("c", sorted(FROZEN_PERIODS))
def test_period_quadrature_frozen_values(c):
    res = period_quadrature(c)
    assert res.period == pytest.approx(FROZEN_PERIODS[c], abs=1e-9)
    assert TWO_SQRT2 < res.period < SQRT2_PI


def test_period_domain():
    with pytest.raises(ValueError):
        period_quadrature(0.5)
    with pytest.raises(ValueError):
        period_ode_oracle(0.5 + 1e-12)


def test_tanh_sinh_known_integrals():
    # int_0^1 s^{-1/2} ds = 2 with an inverse-square-root endpoint
    val, err = tanh_sinh(lambda v, sa, sb: 1.0 / math.sqrt(sa), 0.0, 1.0)
    assert val == pytest.approx(2.0, abs=1e-12)
    # smooth case: int_0^pi sin = 2
    val, _ = tanh_sinh(lambda v, sa, sb: math.sin(v), 0.0, math.pi)
    assert val == pytest.approx(2.0, abs=1e-12)


def test_tanh_sinh_nonconvergence_carries_refinements():
    with pytest.raises(QuadratureError) as err:
        tanh_sinh(lambda v, sa, sb: 1.0 / math.sqrt(sa), 0.0, 1.0,
                  tol=1e-30, max_level=4, min_level=1)
    assert math.isfinite(err.value.last) and math.isfinite(err.value.previous)


# ------------------------------------------------------------- ODE oracle


@pytest.mark.parametrize("c", [0.6, 2.0])
def test_oracle_matches_quadrature(c):
    quad = period_quadrature(c)
    ode = period_ode_oracle(c)
    assert abs(quad.period - ode.period) / quad.period < 1e-6
    assert ode.method == "ode_event"
    assert ode.err_estimate < 1e-8


def test_oracle_event_lands_on_outer_root():
    c = 2.0
    _, c2 = phi_roots(c)
    _, v_event = regularized_half_period(c, 1e-4)
    assert abs(phi(v_event) - c) < 1e-6
    assert v_event == pytest.approx(c2, abs=1e-6)


def test_oracle_path_conserves_h():
    taus, states = oracle_path(2.0, dtau=1e-5, record_every=200)
    u, v = states[:, 0], states[:, 1]
    h = 0.5 * (u**2 + v**2) - np.log(np.abs(v))
    assert np.max(np.abs(h - h[0])) < 1e-10


# ------------------------------------------- angle displacement per revolution


@pytest.mark.parametrize("c", [1.0, 5.0])
def test_x_displacement_equals_period(c):
    res = x_displacement_check(c)
    assert res.rel_error < 1e-5


def test_x_displacement_additive_over_revolutions():
    one = x_displacement_check(1.0)
    three = x_displacement_check(1.0, periods=3)
    assert three.x_displacement == pytest.approx(3 * one.x_displacement, rel=1e-5)


# ------------------------------------------------------------------- bounds


def test_lower_bound_below_period():
    for c in (0.6, 2.0, 20.0):
        assert period_lower_bound(c) < period_quadrature(c).period


def test_lower_bound_large_c_range():
    for c in (10.0, 100.0, 1000.0):
        b = period_lower_bound(c)
        assert TWO_SQRT2 * 0.9 < b < SQRT2_PI


def test_lower_bound_limit_at_half():
    # both roots -> 1 gives 2 sqrt(2) * sqrt(2) = 4
    assert period_lower_bound(0.5 + 1e-8) == pytest.approx(4.0, abs=1e-3)


# ------------------------------------------------------------- rationality


def test_rationality_report_contents():
    rep = rationality_report(2.0, max_denominator=10**6)
    assert 2 * math.sqrt(2) / (2 * math.pi) < rep.ratio < SQRT2_PI / (2 * math.pi)
    assert rep.note == "numerically undecidable classification"
    for p, q, err in rep.convergents:
        if q > 0:
            assert err < 1.0 / q**2 + 1e-15
    assert rep.best_error <= rep.convergents[0][2]
    qs = [q for _, q, _ in rep.convergents]
    assert all(q <= 10**6 for q in qs)


def test_period_strictly_decreasing_on_grid():
    grid = np.exp(np.linspace(math.log(0.1), math.log(19.5), 20)) + 0.5
    vals = [period_quadrature(float(c)).period for c in grid]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_limit_rate_consistent_with_root_collapse():
    # the gap to the limiting value scales linearly in c - 1/2 (the roots
    # collapse like sqrt(c - 1/2), and the period is smooth in their square)
    ks = range(2, 7)
    gaps = [SQRT2_PI - period_quadrature(0.5 + 10.0 ** (-k)).period for k in ks]
    assert all(g > 0 for g in gaps)
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
    slope = np.polyfit([-k * math.log(10) for k in ks], np.log(gaps), 1)[0]
    assert 0.7 < slope < 1.3
