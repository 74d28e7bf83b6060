import random
from decimal import Decimal

import pytest
from mpmath import mp, mpf

from arcsin_bounds_shared.types.bounds import ConstantName
from arcsin_bounds_shared.types.precision import PrecisionConfig
from arcsin_bounds_shared.types.reports import SampleKind
from arcsin_bounds_toolkit.core.bounds import ParameterError
from arcsin_bounds_toolkit.core.certifier import (
    ComplexRootError,
    certify_upper_bound,
    critical_points,
    g_ratio,
    interval_end,
    lower_counterexample,
    quartic_coefficients,
    quartic_from_composition,
    w_by_composition,
    w_eval,
    w_prime,
)
from arcsin_bounds_toolkit.core.oracle import (
    DomainError,
    derivative_precision,
    numeric_derivative,
)

B1 = ConstantName.B1


def _truncated(value: Decimal, places: int) -> int:
    return int(value * 10**places)


def test_interval_end_is_rounded_down(prec):
    end = interval_end(prec)
    with mp.workprec(300):
        assert end <= mp.sqrt(2) - 1
        assert mp.sqrt(2) - 1 - end < mpf("1e-37")


def test_w_vanishes_at_both_ends_for_b1(prec):
    assert abs(w_eval(0, B1, prec)) < mpf("1e-30")
    assert abs(w_eval(interval_end(prec), B1, prec)) < mpf("1e-30")


def test_w_is_positive_inside_for_b1(prec):
    assert w_eval("0.0869", B1, prec) > 0
    assert w_eval("0.3", B1, prec) > 0


@pytest.mark.parametrize("u", ["-0.01", "0.5"])
def test_w_domain(prec, u):
    with pytest.raises(DomainError):
        w_eval(u, B1, prec)


@pytest.mark.parametrize("b", [B1, Decimal("3.9"), Decimal(4)])
def test_substitution_matches_composition(prec, b):
    rng = random.Random(1234)
    end = float(interval_end(prec))
    for _ in range(200):
        u = Decimal(repr(rng.uniform(0.0, end)))
        assert abs(w_eval(u, b, prec) - w_by_composition(u, b, prec)) < mpf("1e-25"), u


@pytest.mark.parametrize(
    "b", [B1, Decimal(1), Decimal(3), Decimal("3.9"), Decimal("4.5")]
)
def test_quartic_matches_its_derivation(prec, b):
    direct = quartic_coefficients(b, prec)
    derived = quartic_from_composition(b, prec)
    assert len(direct) == len(derived) == 5
    for c_direct, c_derived in zip(direct, derived):
        assert abs(c_direct - c_derived) < mpf("1e-30")


@pytest.mark.parametrize("b", [B1, Decimal(1), Decimal("2.5"), Decimal("4.5")])
def test_quartic_has_double_root_at_interval_end(prec, b):
    coeffs = quartic_coefficients(b, prec)
    with mp.workprec(prec.mantissa_bits):
        value, slope = mp.polyval(coeffs, mp.sqrt(2) - 1, derivative=True)
        assert abs(value) < mpf("1e-30")
        assert abs(slope) < mpf("1e-30")


@pytest.mark.parametrize("u", ["0.05", "0.15", "0.25", "0.35"])
def test_w_prime_matches_numeric_derivative(prec, u):
    work = derivative_precision(prec)
    estimate = numeric_derivative(
        lambda v: w_eval(v, B1, work), u, 1, prec, domain=(0, interval_end(prec))
    )
    assert abs(w_prime(u, B1, prec) - estimate.value) < mpf("1e-15")


def test_critical_points_of_b1(prec):
    points = critical_points(B1, prec)
    assert len(points) == 3
    u1, u23, u4 = points
    assert _truncated(u1.u, 4) == 869
    assert _truncated(u4.u, 4) == 8400
    assert u1.in_interval and u23.in_interval and not u4.in_interval
    assert u1.polished and u4.polished
    assert u23.multiplicity == 2 and not u23.polished
    with mp.workprec(200):
        assert abs(mpf(str(u23.u)) - (mp.sqrt(2) - 1)) < mpf("1e-37")
    for point in points:
        assert point.w_prime_residual < Decimal("1e-25")


@pytest.mark.parametrize("b", [Decimal("4.5"), Decimal(1)])
def test_critical_points_complex(prec, b):
    with pytest.raises(ComplexRootError, match="complex"):
        critical_points(b, prec)


def test_critical_points_rejects_nonpositive_b(prec):
    with pytest.raises(ParameterError):
        critical_points(Decimal(-1), prec)


def test_certificate_for_b1(cert_prec):
    certificate = certify_upper_bound(B1, cert_prec)
    assert certificate.verdict
    assert not certificate.violations
    assert certificate.min_value >= Decimal("-1e-30")
    assert all(abs(v) <= Decimal("1e-30") for v in certificate.endpoint_values)
    assert len(certificate.critical_points) == 2
    assert all(v > 0 for v in certificate.extremum_values[:1])
    assert certificate.precision_used == 256
    assert abs(certificate.b - Decimal("3.876452545133979")) < Decimal("1e-14")


def test_certificate_defaults_to_certification_precision():
    assert certify_upper_bound(B1).precision_used == 256


def test_certificate_below_b1(cert_prec):
    assert certify_upper_bound(Decimal("3.376452527"), cert_prec).verdict


def test_certificate_fails_above_four(cert_prec):
    certificate = certify_upper_bound(Decimal("4.5"), cert_prec)
    assert not certificate.verdict
    assert certificate.critical_points == []
    assert certificate.endpoint_values[0] < 0
    assert any(v.kind is SampleKind.ENDPOINT for v in certificate.violations)
    assert any(v.u > Decimal("0.3") for v in certificate.violations)


@pytest.mark.parametrize("bits", [128, 256, 512])
def test_certificate_verdict_is_stable_under_precision(bits):
    prec = PrecisionConfig(mantissa_bits=bits)
    assert certify_upper_bound(B1, prec).verdict
    assert not certify_upper_bound(Decimal("3.95"), prec).verdict


def test_g_ratio_uses_series_near_zero(prec):
    b = Decimal("3.9")
    with mp.workprec(prec.mantissa_bits):
        limit = (4 - mpf("3.9")) / (24 * (2 + mpf("3.9")))
    assert g_ratio("1e-7", b, prec) == g_ratio(0, b, prec)
    assert abs(g_ratio(0, b, prec) - limit) < mpf("1e-35")
    assert abs(g_ratio("1e-3", b, prec) - limit) < mpf("1e-5")


def test_lower_counterexample(prec):
    result = lower_counterexample(Decimal("3.9"), prec)
    assert abs(result.g_at_zero - Decimal("0.00070621")) < Decimal("1e-8")
    assert result.g_at_one < 0
    assert 0 < result.xi < result.c_b < 1
    assert result.g_at_xi > 0


@pytest.mark.parametrize("b", [Decimal("3.5"), Decimal(4), Decimal("4.5")])
def test_lower_counterexample_range(prec, b):
    with pytest.raises(ParameterError, match=r"\(b1, 4\)"):
        lower_counterexample(b, prec)
