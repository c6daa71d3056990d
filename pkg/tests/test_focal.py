"""Focal values: series expansion, numeric Lyapunov engine, closed forms."""

import math

import numpy as np
import pytest

import helpers
from lotkacenter import (
    CanonicalParams,
    FocalBranch,
    InsufficientDegree,
    PreconditionViolated,
    closed_form_focal,
    focal_record,
    lyapunov_numeric,
    taylor_expand,
    vector_field,
)


def _poly_eval(tf, u, v):
    n = tf.degree + 1
    pu = np.array([u**i for i in range(n)])
    pv = np.array([v**j for j in range(n)])
    return float(pu @ tf.fx @ pv), float(pu @ tf.fy @ pv)


def test_taylor_linear_field_is_exact():
    tf = taylor_expand(CanonicalParams(0.0, 1.0, 1.0, 0.0, 2.0), 3)
    fx = np.zeros((4, 4))
    fx[0, 1] = 1.0
    fy = np.zeros((4, 4))
    fy[1, 0] = -2.0
    assert np.array_equal(tf.fx, fx)
    assert np.array_equal(tf.fy, fy)


def test_taylor_pure_power_expansion():
    tf = taylor_expand(CanonicalParams(2.0, 0.0, 0.0, 0.0, 1.0), 3)
    assert tf.fx[1, 0] == 2.0
    assert tf.fx[2, 0] == 1.0
    assert tf.fx[3, 0] == 0.0
    assert np.count_nonzero(tf.fx) == 2
    assert np.count_nonzero(tf.fy) == 0


def test_taylor_fractional_power():
    tf = taylor_expand(CanonicalParams(0.5, 0.0, 0.0, 0.0, 1.0), 2)
    assert tf.fx[1, 0] == pytest.approx(0.5, abs=1e-15)
    assert tf.fx[2, 0] == pytest.approx(-0.125, abs=1e-15)


def test_taylor_matches_field_near_equilibrium():
    rng = np.random.default_rng(9)
    for i in range(30):
        vals = rng.uniform(-3.0, 3.0, 4)
        c = CanonicalParams(*(float(x) for x in vals), float(np.exp(rng.uniform(-1, 1))))
        tf = taylor_expand(c, 4)
        for theta in np.linspace(0.0, 2.0 * np.pi, 8, endpoint=False):
            u, v = 0.05 * math.cos(theta), 0.05 * math.sin(theta)
            exact = vector_field(c, (1.0 + u, 1.0 + v))
            approx = _poly_eval(tf, u, v)
            assert abs(exact[0] - approx[0]) <= 5e-5, f"draw {i}"
            assert abs(exact[1] - approx[1]) <= 5e-5, f"draw {i}"


def test_taylor_rejects_bad_degree():
    with pytest.raises(ValueError):
        taylor_expand(CanonicalParams(0.0, 1.0, 1.0, 0.0, 1.0), 0)


def test_numeric_engine_linear_center():
    q = lyapunov_numeric(taylor_expand(CanonicalParams(0.0, 1.0, 1.0, 0.0, 1.0), 5), 2)
    assert q.ell == (0.0, 0.0)
    assert q.omega == 1.0


def test_numeric_engine_weak_focus_order_two():
    q = lyapunov_numeric(taylor_expand(CanonicalParams(1.0, 2.0, 1.0, 1.0, 1.0), 5), 2)
    assert abs(q.ell[0]) <= 1e-14
    assert q.ell[1] == pytest.approx(-1.0 / 96.0, rel=1e-12)


def test_numeric_engine_center_row_sample():
    q = lyapunov_numeric(taylor_expand(CanonicalParams(-0.5, -1.25, -1.5, -0.25, 2.0), 5), 2)
    assert abs(q.ell[0]) <= 1e-12
    assert abs(q.ell[1]) <= 1e-12


def test_numeric_engine_requires_degree():
    tf = taylor_expand(CanonicalParams(1.0, 2.0, 1.0, 1.0, 1.0), 3)
    with pytest.raises(InsufficientDegree):
        lyapunov_numeric(tf, 2)
    with pytest.raises(InsufficientDegree):
        lyapunov_numeric(taylor_expand(CanonicalParams(1.0, 2.0, 1.0, 1.0, 1.0), 2), 1)


def test_numeric_engine_rejects_nonelliptic_linear_part():
    with pytest.raises(PreconditionViolated):
        lyapunov_numeric(taylor_expand(CanonicalParams(1.0, 2.0, 1.0, 1.0, 2.0), 5), 1)
    with pytest.raises(PreconditionViolated):
        lyapunov_numeric(taylor_expand(CanonicalParams(2.0, 1.0, 1.0, 1.0, 1.0), 5), 1)


def test_closed_form_first_value():
    fv = closed_form_focal(CanonicalParams(2.0, -1.0, -3.0, 1.0, 2.0))
    assert fv.L1 == pytest.approx(math.pi / (2.0 * math.sqrt(2.0)), rel=1e-15)
    assert fv.branch is FocalBranch.NOT_APPLICABLE
    assert fv.L2 is None


def test_closed_form_first_value_vanishing_bracket():
    fv = closed_form_focal(CanonicalParams(1.0, -1.0, -2.0, 0.5, 2.0))
    assert fv.L1 == 0.0
    assert fv.branch is FocalBranch.CASE_B_D_NONZERO


def test_closed_form_second_value_pinned():
    fv = closed_form_focal(CanonicalParams(1.0, 2.0, 1.0, 1.0, 1.0))
    assert fv.L1 == 0.0
    assert fv.L2 == pytest.approx(-math.pi / 96.0, abs=1e-12)
    assert fv.branch is FocalBranch.CASE_C2
    fv = closed_form_focal(CanonicalParams(1.0, -2.0, -3.0, 1.0, 1.0))
    assert fv.L2 == pytest.approx(-math.pi / (96.0 * math.sqrt(5.0)), abs=1e-12)
    assert fv.branch is FocalBranch.CASE_C2


def test_closed_form_branches():
    fv = closed_form_focal(CanonicalParams(0.0, 1.0, 1.0, 0.0, 1.0))
    assert fv.branch is FocalBranch.CASE_A_B3_ZERO
    assert fv.L1 == 0.0 and fv.L2 == 0.0
    fv = closed_form_focal(CanonicalParams(0.8, -1.5, -1.0, 1.0, 0.8))
    assert fv.branch is FocalBranch.CASE_C1
    assert fv.L1 == 0.0 and fv.L2 == 0.0
    fv = closed_form_focal(CanonicalParams(-0.5, -1.25, -1.5, -0.25, 2.0))
    assert fv.branch is FocalBranch.CASE_B_D_NONZERO
    assert fv.L1 == 0.0 and fv.L2 == 0.0
    assert fv.d_value == pytest.approx(3.0, abs=1e-14)


def test_closed_form_rejects_nonelliptic():
    with pytest.raises(PreconditionViolated):
        closed_form_focal(CanonicalParams(1.0, 2.0, 1.0, 1.0, 2.0))
    with pytest.raises(PreconditionViolated):
        closed_form_focal(CanonicalParams(2.0, 1.0, 1.0, 1.0, 1.0))


def test_first_value_sign_probes():
    assert closed_form_focal(CanonicalParams(1.02, -2.0, -3.0, 1.0, 1.02)).L1 > 0.0
    assert closed_form_focal(CanonicalParams(0.98, 2.0, 1.0, 1.0, 0.98)).L1 > 0.0
    assert closed_form_focal(CanonicalParams(1.02, 2.0, 1.0, 1.0, 1.02)).L1 < 0.0


def test_engine_and_closed_form_first_value_agree():
    # the numeric coefficient equals the closed form divided by pi
    for i, c in enumerate(helpers.elliptic_draws(17, 120)):
        fv = closed_form_focal(c)
        q = lyapunov_numeric(taylor_expand(c, 3), 1)
        assert q.ell[0] * math.pi == pytest.approx(fv.L1, rel=1e-8, abs=1e-10), f"draw {i}"


def test_engine_and_closed_form_second_value_generic_stratum():
    # on the generic vanishing-L1 stratum: pi*ell2 = K*L2
    for i, c in enumerate(helpers.case_b_stratum_draws(29, 60)):
        fv = closed_form_focal(c)
        assert fv.L1 == pytest.approx(0.0, abs=1e-10)
        q = lyapunov_numeric(taylor_expand(c, 5), 2)
        assert q.ell[1] * math.pi == pytest.approx(c.K * fv.L2, rel=1e-6, abs=1e-10), f"draw {i}"


def test_engine_and_closed_form_second_value_unit_stratum():
    # on the b3=1, K=1 stratum: pi*ell2 = L2
    for i, c in enumerate(helpers.c2_stratum_draws(43, 60)):
        fv = closed_form_focal(c)
        assert fv.branch is FocalBranch.CASE_C2
        q = lyapunov_numeric(taylor_expand(c, 5), 2)
        assert q.ell[1] * math.pi == pytest.approx(fv.L2, rel=1e-6, abs=1e-10), f"draw {i}"


def test_d_value_factors_on_unit_stratum():
    for i, c in enumerate(helpers.c2_stratum_draws(47, 40)):
        fv = closed_form_focal(c)
        assert fv.d_value == pytest.approx((1.0 + c.a3) * (1.0 - c.K), abs=1e-12), f"draw {i}"


def test_focal_record_text():
    fv = closed_form_focal(CanonicalParams(1.0, 2.0, 1.0, 1.0, 1.0))
    text = focal_record(fv)
    assert "L1" in text
    assert "L2" in text
    assert "CaseC2" in text
