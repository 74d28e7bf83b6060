from decimal import Decimal

import pytest
from hypothesis import given
from hypothesis import strategies as st
from mpmath import mp, mpf

from arcsin_bounds_shared.types.precision import PrecisionConfig
from arcsin_bounds_toolkit.core.oracle import (
    DomainError,
    Stencil,
    StepCollapseError,
    arcsin_ref,
    check_interval,
    const_pi,
    const_sqrt2,
    derivative_precision,
    numeric_derivative,
    sin_ref,
    to_decimal,
    to_mpf,
)

unit_floats = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)

PI_DIGITS = "3.14159265358979323846264338327950288419716939937510"
SQRT2_DIGITS = "1.41421356237309504880168872420969807856967187537694"


def test_constants_at_64_bits():
    prec = PrecisionConfig(mantissa_bits=64)
    pi, sqrt2 = const_pi(prec), const_sqrt2(prec)
    assert mp.nstr(pi, 19).startswith("3.14159265358979323")
    assert mp.nstr(sqrt2, 19).startswith("1.41421356237309504")
    with mp.workprec(64):
        assert pi == mpf(PI_DIGITS)
        assert sqrt2 == mpf(SQRT2_DIGITS)


@pytest.mark.parametrize("bits", [64, 113, 128, 256, 1000])
def test_constants_are_correctly_rounded(bits):
    prec = PrecisionConfig(mantissa_bits=bits)
    with mp.workprec(bits + 64):
        pi, sqrt2 = +mp.pi, mp.sqrt(2)
    with mp.workprec(bits):
        assert const_pi(prec) == +pi
        assert const_sqrt2(prec) == +sqrt2


def test_pi_squared_over_six_matches_basel_partial_sums(prec):
    n = 1000
    with mp.workprec(prec.mantissa_bits):
        target = const_pi(prec) ** 2 / 6
        partial = mp.fsum(mpf(1) / k**2 for k in range(1, n + 1))
        assert partial < target < partial + mpf(1) / n
        # Euler-Maclaurin tail of the series beyond n
        m = mpf(n)
        tail = 1 / m - 1 / (2 * m**2) + 1 / (6 * m**3) - 1 / (30 * m**5)
        assert abs(partial + tail - target) < mpf("1e-20")


@pytest.mark.parametrize(
    "x, expected",
    [
        (0, lambda: mpf(0)),
        (1, lambda: mp.pi / 2),
        ("0.5", lambda: mp.pi / 6),
        (Decimal("0.5"), lambda: mp.pi / 6),
    ],
)
def test_arcsin_ref_special_values(prec, x, expected):
    with mp.workprec(200):
        assert abs(arcsin_ref(x, prec) - expected()) < mpf("1e-37")


@pytest.mark.parametrize("x", [-0.1, 1.1, "1.0000000001"])
def test_arcsin_ref_rejects_points_outside_unit_interval(prec, x):
    with pytest.raises(DomainError):
        arcsin_ref(x, prec)


@given(x=unit_floats)
def test_arcsin_ref_matches_mpmath_asin(x):
    prec = PrecisionConfig()
    with mp.workprec(200):
        assert abs(arcsin_ref(x, prec) - mp.asin(mpf(x))) < mpf("1e-35")


@given(x=unit_floats)
def test_sin_undoes_arcsin(x):
    prec = PrecisionConfig()
    with mp.workprec(200):
        assert abs(sin_ref(arcsin_ref(x, prec), prec) - mpf(x)) < mpf("1e-30")


@given(x=unit_floats, y=unit_floats)
def test_arcsin_ref_is_monotone(x, y):
    prec = PrecisionConfig()
    lo, hi = sorted((x, y))
    assert arcsin_ref(lo, prec) <= arcsin_ref(hi, prec)


def test_result_precision_does_not_leak_into_caller(prec):
    with mp.workprec(53):
        arcsin_ref("0.3", prec)
        assert mp.prec == 53


def test_check_interval_bounds():
    assert check_interval("0.25") == mpf("0.25")
    with pytest.raises(DomainError):
        check_interval("0.5", 0, "0.4")


def test_to_decimal_carries_all_digits(prec):
    with mp.workprec(prec.mantissa_bits):
        value = to_decimal(mpf(1) / 3, prec)
    assert str(value).startswith("0.3333333333")
    assert len(value.as_tuple().digits) == prec.decimal_digits


def test_to_mpf_reads_decimals_exactly():
    with mp.workprec(200):
        assert to_mpf(Decimal("0.1")) == mpf("0.1")


def test_derivative_precision_adds_extra_bits(prec):
    assert derivative_precision(prec).mantissa_bits == 128 + 96
    widest = PrecisionConfig(mantissa_bits=4096)
    assert derivative_precision(widest).mantissa_bits == 4096


def test_numeric_derivative_polynomial(prec):
    estimate = numeric_derivative(lambda x: x**3, "0.3", 1, prec)
    assert estimate.stencil is Stencil.CENTRAL
    with mp.workprec(prec.mantissa_bits):
        assert abs(estimate.value - 3 * mpf("0.3") ** 2) < mpf("1e-25")


def test_numeric_derivative_third_order_of_sine(prec):
    estimate = numeric_derivative(mp.sin, "0.4", 3, prec)
    with mp.workprec(200):
        assert abs(estimate.value + mp.cos(mpf("0.4"))) < mpf("1e-20")


def test_numeric_derivative_switches_to_forward_at_left_end(prec):
    estimate = numeric_derivative(mp.exp, 0, 2, prec)
    assert estimate.stencil is Stencil.FORWARD
    assert abs(estimate.value - 1) < mpf("1e-15")


def test_forward_stencil_extrapolates_past_sixth_order(prec):
    estimate = numeric_derivative(mp.exp, 0, 5, prec)
    assert estimate.stencil is Stencil.FORWARD
    # each tableau level past the first raises the one-sided order by one
    assert estimate.levels >= 6
    assert abs(estimate.value - 1) < mpf("1e-20")


def test_numeric_derivative_switches_to_backward_at_right_end(prec):
    estimate = numeric_derivative(lambda x: x**2, 1, 1, prec)
    assert estimate.stencil is Stencil.BACKWARD
    assert abs(estimate.value - 2) < mpf("1e-25")


def test_numeric_derivative_order_zero_is_the_value(prec):
    estimate = numeric_derivative(lambda x: 3 * x, "0.5", 0, prec)
    assert estimate.value == mpf("1.5")
    assert estimate.levels == 0


def test_numeric_derivative_never_samples_outside_domain(prec):
    seen = []

    def f(x):
        seen.append(x)
        return mp.exp(x)

    numeric_derivative(f, 0, 5, prec)
    assert min(seen) >= 0


def test_numeric_derivative_step_collapse(prec):
    with pytest.raises(StepCollapseError):
        numeric_derivative(mp.exp, "0.005", 1, prec, domain=(0, "0.01"))


@pytest.mark.parametrize("order", [-1, 6])
def test_numeric_derivative_rejects_order(prec, order):
    with pytest.raises(ValueError, match="order"):
        numeric_derivative(mp.exp, "0.5", order, prec)


def test_arcsin_inverts_sine_on_a_grid(prec):
    with mp.workprec(prec.mantissa_bits):
        ts = [mp.pi / 2 * k / 64 for k in range(65)]
    for t in ts:
        assert abs(arcsin_ref(sin_ref(t, prec), prec) - t) < mpf("1e-30")


def test_numeric_derivative_of_arcsin_at_zero(prec):
    work = derivative_precision(prec)
    estimate = numeric_derivative(lambda x: arcsin_ref(x, work), 0, 1, prec)
    assert abs(estimate.value - 1) < mpf("1e-20")


@pytest.mark.parametrize("order", [1, 2, 3, 4, 5])
def test_error_estimate_covers_polynomial_error(prec, order):
    coeffs = [3, -2, 5, 1, -4, 2, 7]

    def poly(x):
        return mp.fsum(c * x**k for k, c in enumerate(coeffs))

    with mp.workprec(derivative_precision(prec).mantissa_bits):
        x0 = mpf("0.3")
        exact = mp.fsum(
            c * mp.ff(k, order) * x0 ** (k - order)
            for k, c in enumerate(coeffs)
            if k >= order
        )
        estimate = numeric_derivative(poly, x0, order, prec)
        assert abs(estimate.value - exact) <= estimate.error + mpf("1e-50")
    assert abs(estimate.value - exact) < mpf("1e-25")


def test_second_derivative_of_square(prec):
    estimate = numeric_derivative(lambda x: x**2, "0.3", 2, prec)
    assert abs(estimate.value - 2) < mpf("1e-25")
