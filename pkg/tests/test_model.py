"""Parameter containers, linearization, and canonicalization."""

import math

import numpy as np
import pytest

import helpers
from lotkacenter import (
    CanonicalParams,
    DomainError,
    EigenvalueKind,
    NonIsolatedEquilibrium,
    NoPositiveEquilibrium,
    OffsetParams,
    Point,
    RawLotkaParams,
    canonicalize,
    from_offset_form,
    from_record,
    jacobian,
    to_offset_form,
    to_record,
    vector_field,
)


def test_point_rejects_nonpositive_coordinates():
    with pytest.raises(DomainError):
        Point(0.0, 1.0)
    with pytest.raises(DomainError):
        Point(1.0, -2.0)
    with pytest.raises(DomainError):
        Point(float("nan"), 1.0)


def test_point_rejects_infinite_coordinates():
    with pytest.raises(ValueError):
        Point(float("inf"), 1.0)


def test_raw_params_reject_nonpositive_rates():
    with pytest.raises(ValueError):
        RawLotkaParams(0.0, 1.0, 1.0, 1.0, 1, 0, 1, 1, 0, 1)
    with pytest.raises(ValueError):
        RawLotkaParams(1.0, -1.0, 1.0, 1.0, 1, 0, 1, 1, 0, 1)


def test_canonical_params_reject_bad_k():
    with pytest.raises(ValueError):
        CanonicalParams(0.0, 1.0, 1.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        CanonicalParams(0.0, 1.0, 1.0, 0.0, -3.0)
    with pytest.raises(ValueError):
        CanonicalParams(float("nan"), 1.0, 1.0, 0.0, 1.0)


def test_vector_field_values():
    c = CanonicalParams(0.0, 1.0, 1.0, 0.0, 4.0)
    assert vector_field(c, (2.0, 3.0)) == (2.0, -4.0)
    c = CanonicalParams(1.0, -1.0, 0.0, 0.0, 2.5)
    assert vector_field(c, (4.0, 2.0)) == (1.0, 0.0)


def test_vector_field_rejects_boundary_points():
    c = CanonicalParams(1.0, 1.0, 1.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        vector_field(c, (0.0, 1.0))
    with pytest.raises(DomainError):
        vector_field(c, (1.0, -1.0))


def test_equilibrium_is_exact():
    for i, c in enumerate(helpers.elliptic_draws(11, 40)):
        assert vector_field(c, (1.0, 1.0)) == (0.0, 0.0), f"draw {i}"
    assert vector_field(CanonicalParams(2.7, -3.1, 0.4, 9.9, 0.03), Point(1.0, 1.0)) == (0.0, 0.0)


def test_jacobian_purely_imaginary_example():
    js = jacobian(CanonicalParams(1.0, 2.0, 1.0, 1.0, 1.0))
    assert js.trace == 0.0
    assert js.determinant == 1.0
    assert js.omega == 1.0
    assert js.eigenvalue_kind is EigenvalueKind.PURELY_IMAGINARY


def test_jacobian_classical_volume_preserving_family():
    js = jacobian(CanonicalParams(0.0, 1.0, 1.0, 0.0, 3.0))
    assert js.trace == 0.0
    assert js.determinant == 3.0
    assert js.eigenvalue_kind is EigenvalueKind.PURELY_IMAGINARY


def test_jacobian_zero_eigenvalue():
    js = jacobian(CanonicalParams(1.0, 1.0, 1.0, 1.0, 1.0))
    assert js.determinant == 0.0
    assert js.eigenvalue_kind is EigenvalueKind.ZERO_EIGENVALUE


def test_jacobian_saddle():
    js = jacobian(CanonicalParams(2.0, 1.0, 1.0, 1.0, 1.0))
    assert js.determinant == -1.0
    assert js.eigenvalue_kind is EigenvalueKind.REAL_DISTINCT
    assert js.omega == 0.0


def test_jacobian_matches_finite_differences():
    rng = np.random.default_rng(23)
    h = 1e-6
    for i in range(60):
        vals = rng.uniform(-10.0, 10.0, 4)
        c = CanonicalParams(*(float(v) for v in vals), float(np.exp(rng.uniform(-1, 1))))
        js = jacobian(c)
        expected = np.array([[c.a1, c.b1], [-c.K * c.a3, -c.K * c.b3]])
        fd = np.empty((2, 2))
        for j, (dx, dy) in enumerate(((h, 0.0), (0.0, h))):
            fp = vector_field(c, (1.0 + dx, 1.0 + dy))
            fm = vector_field(c, (1.0 - dx, 1.0 - dy))
            fd[0, j] = (fp[0] - fm[0]) / (2 * h)
            fd[1, j] = (fp[1] - fm[1]) / (2 * h)
        scale = np.maximum(1.0, np.abs(expected))
        assert np.all(np.abs(fd - expected) <= 1e-6 * scale), f"draw {i}"
        assert js.trace == c.a1 - c.K * c.b3
        assert js.determinant == c.K * (c.a3 * c.b1 - c.a1 * c.b3)


def test_canonicalize_classical_system():
    raw = RawLotkaParams(1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0)
    c, eq = canonicalize(raw)
    assert (eq.x, eq.y) == (1.0, 1.0)
    assert c == CanonicalParams(0.0, -1.0, -1.0, 0.0, 1.0)


def test_canonicalize_decoupled_rates():
    raw = RawLotkaParams(2.0, 1.0, 1.0, 2.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0)
    c, eq = canonicalize(raw)
    assert eq.x == pytest.approx(0.5, abs=1e-15)
    assert eq.y == pytest.approx(0.5, abs=1e-15)
    assert (c.a1, c.b1, c.a3, c.b3) == (1.0, 0.0, 0.0, 1.0)
    assert c.K == pytest.approx(1.0, abs=1e-15)


def test_canonicalize_singular_inconsistent():
    raw = RawLotkaParams(1.0, 1.0, 2.0, 1.0, 1.0, 1.0, 0.0, 0.0, 1.0, 1.0)
    with pytest.raises(NoPositiveEquilibrium):
        canonicalize(raw)


def test_canonicalize_singular_consistent():
    raw = RawLotkaParams(1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 1.0, 1.0)
    with pytest.raises(NonIsolatedEquilibrium):
        canonicalize(raw)


def _raw_field(raw, x, y):
    m2 = x**raw.alpha2 * y**raw.beta2
    fx = raw.k1 * x**raw.alpha1 * y**raw.beta1 - raw.k2 * m2
    fy = raw.k3 * m2 - raw.k4 * x**raw.alpha3 * y**raw.beta3
    return fx, fy


def test_canonicalize_zeroes_raw_field():
    for i, (raw, _) in enumerate(helpers.raw_draws(5, 200)):
        c, eq = canonicalize(raw)
        fx, fy = _raw_field(raw, eq.x, eq.y)
        scale = max(1.0, raw.k1 * eq.x**raw.alpha1 * eq.y**raw.beta1)
        assert abs(fx) <= 1e-12 * scale, f"draw {i}"
        assert abs(fy) <= 1e-12 * scale, f"draw {i}"
        assert (c.a1, c.b1, c.a3, c.b3) == raw.exponent_differences()
        assert c.K > 0.0


def test_offset_form_examples():
    d = to_offset_form(CanonicalParams(0.0, 1.0, 1.0, 0.0, 1.0))
    assert (d.p_hat, d.q_hat, d.p, d.q, d.C) == (-1.0, -1.0, -1.0, -1.0, 1.0)
    d = to_offset_form(CanonicalParams(0.0, 0.0, 0.0, 0.0, 2.5))
    assert (d.p_hat, d.q_hat, d.p, d.q, d.C) == (0.0, 0.0, 0.0, 0.0, 2.5)


def test_offset_form_classical_correspondence():
    c = from_offset_form(OffsetParams(1.0, 1.0, 1.0, 1.0, 1.0))
    assert c == CanonicalParams(0.0, -1.0, -1.0, 0.0, 1.0)
    assert to_offset_form(c) == OffsetParams(1.0, 1.0, 1.0, 1.0, 1.0)


def test_offset_form_round_trip_exact_on_dyadic_grid():
    # exponents with few fractional bits subtract without rounding
    rng = np.random.default_rng(31)
    for i in range(500):
        vals = rng.integers(-320, 321, 4) / 64.0
        c = CanonicalParams(*(float(v) for v in vals), float(rng.integers(1, 64)) / 16.0)
        assert from_offset_form(to_offset_form(c)) == c, f"draw {i}"


def test_offset_form_round_trip_continuous_draws():
    rng = np.random.default_rng(37)
    for i in range(500):
        vals = rng.uniform(-5.0, 5.0, 4)
        c = CanonicalParams(*(float(v) for v in vals), float(np.exp(rng.uniform(-1.5, 1.5))))
        c2 = from_offset_form(to_offset_form(c))
        for name in ("a1", "b1", "a3", "b3", "K"):
            assert getattr(c2, name) == pytest.approx(getattr(c, name), abs=2e-15), f"draw {i}"


def test_record_round_trip():
    rng = np.random.default_rng(41)
    for _ in range(200):
        vals = rng.uniform(-8.0, 8.0, 4)
        c = CanonicalParams(*(float(v) for v in vals), float(np.exp(rng.uniform(-2, 2))))
        assert from_record(to_record(c)) == c
    c = CanonicalParams(1 / 3, -3.0, -1.0, 1.0, 1 / 3)
    assert from_record(to_record(c)) == c


def test_record_rejects_malformed_text():
    with pytest.raises(ValueError):
        from_record("a1=1.0\nb1=2.0\nbogus=3.0\nb3=0.0\nK=1.0")
    with pytest.raises(ValueError):
        from_record("a1=1.0\nb1=2.0")


def test_exponent_differences():
    raw = RawLotkaParams(1.0, 1.0, 1.0, 1.0, 2.0, 3.0, 1.5, 1.0, -0.5, 2.0)
    assert raw.exponent_differences() == (0.5, 2.0, -2.0, 1.0)


def test_trace_and_omega_consistency():
    for i, c in enumerate(helpers.elliptic_draws(3, 60)):
        js = jacobian(c)
        assert abs(js.trace) <= 1e-12 * (1.0 + abs(c.a1) + c.K * abs(c.b3)), f"draw {i}"
        assert js.determinant > 0.0, f"draw {i}"
        assert js.omega == pytest.approx(math.sqrt(js.determinant), rel=1e-15), f"draw {i}"
        assert js.eigenvalue_kind is EigenvalueKind.PURELY_IMAGINARY, f"draw {i}"
