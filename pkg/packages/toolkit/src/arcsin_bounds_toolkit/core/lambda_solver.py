"""Parameter derivation for the square-root family.

Matching value and slope of Phi_{alpha,beta} with arcsin at x = 0 forces
alpha = beta + 2, which leaves the one-parameter family f_beta. The higher
derivatives of f_beta - arcsin at 0 and the endpoint condition f_b(1) = pi/2
then single out the optimal constants 4 (lower) and b1 (upper).
"""

from decimal import Decimal
from typing import Callable, List, Optional, Union

import structlog
from mpmath import mp, mpf

from arcsin_bounds_shared.types.bounds import (
    BoundFamily,
    BoundSpec,
    ConstantName,
    Parameter,
)
from arcsin_bounds_shared.types.precision import PrecisionConfig
from arcsin_bounds_shared.types.reports import (
    AlgebraicOptimalityReport,
    DiscrepancyReport,
    EndpointSolution,
    MatchResidual,
    OptimalityReport,
    UpperWitness,
)
from arcsin_bounds_toolkit.core.bounds import (
    CertificationError,
    ParameterError,
    eval_bound,
    eval_family,
    eval_matched,
    resolve_parameter,
)
from arcsin_bounds_toolkit.core.certifier import lower_counterexample
from arcsin_bounds_toolkit.core.oracle import (
    GUARD_BITS,
    Real,
    arcsin_ref,
    const_pi,
    derivative_precision,
    numeric_derivative,
    to_decimal,
    to_mpf,
    tolerance,
)
from arcsin_bounds_toolkit.core.roots import BracketError, bisect, secant_polish

logger = structlog.get_logger(__name__)

MAX_ORDER = 5
ANALYTIC_ZERO_ORDERS = (0, 1, 2, 4)

# b -> f_b(1) = (b+2) sqrt(2) / (b + sqrt(2)) decreases from 2 to sqrt(2)
# on this bracket.
B_BRACKET_LO = "0.001"  # times sqrt(2)
B_BRACKET_HI = 1000

# Numeric derivatives that must vanish are accepted below this magnitude.
NUMERIC_ZERO = 1e-10

UPPER_WITNESS_OFFSET = Decimal("0.1")
ALGEBRAIC_LOWER_OFFSET = Decimal("0.1")

ParamValue = Union[Parameter, Real]


class NoSolutionError(ValueError):
    """Raised when the endpoint condition has no solution in the bracket."""

    pass


def _positive(name: str, value: ParamValue, bits: int) -> mpf:
    number = resolve_parameter(value, bits)
    if not number > 0:
        raise ParameterError(f"{name} must be positive, got {value}")
    return number


def match_at_zero(
    alpha: ParamValue, beta: ParamValue, prec: PrecisionConfig
) -> MatchResidual:
    """Residuals of Phi_{alpha,beta}(0) = arcsin(0) and Phi'(0) = arcsin'(0).

    The slope is a one-sided numeric derivative at 0, so the second residual
    is Phi'(0) - 1 = alpha/(beta+2) - 1 up to extrapolation error.
    """
    bits = prec.mantissa_bits
    a = _positive("alpha", alpha, bits + GUARD_BITS)
    b = _positive("beta", beta, bits + GUARD_BITS)
    work = derivative_precision(prec)

    def phi(x: mpf) -> mpf:
        return eval_family(BoundFamily.SQRT_TWO_PARAM, a, b, x, work)

    with mp.workprec(bits):
        value_residual = abs(phi(mpf(0)))
        slope = numeric_derivative(phi, 0, 1, prec)
        slope_residual = abs(slope.value - 1)
        # one-sided extrapolation keeps roughly a third of the mantissa
        limit = tolerance(bits // 3)
        matched = value_residual <= limit and slope_residual <= limit

    logger.debug(
        "matched value and slope at zero",
        alpha=mp.nstr(a, 10),
        beta=mp.nstr(b, 10),
        slope_residual=mp.nstr(slope_residual, 5),
    )
    return MatchResidual(
        alpha=to_decimal(a, prec),
        beta=to_decimal(b, prec),
        value_residual=to_decimal(value_residual, prec),
        slope_residual=to_decimal(slope_residual, prec),
        matched=matched,
    )


def analytic_discrepancy(order: int, beta: ParamValue, prec: PrecisionConfig) -> mpf:
    """order-th derivative of f_beta - arcsin at 0 in closed form."""
    if not 0 <= order <= MAX_ORDER:
        raise ParameterError(f"derivative order must be in 0..{MAX_ORDER}, got {order}")
    b = _positive("beta", beta, prec.mantissa_bits)
    with mp.workprec(prec.mantissa_bits):
        if order in ANALYTIC_ZERO_ORDERS:
            return mpf(0)
        if order == 3:
            return (4 - b) / (4 * (2 + b))
        return 3 * (128 + 18 * b - 13 * b**2) / (16 * (2 + b) ** 2)


def _gap_to_arcsin(beta: mpf, prec: PrecisionConfig) -> Callable[[mpf], mpf]:
    work = derivative_precision(prec)

    def gap(x: mpf) -> mpf:
        return eval_matched(beta, x, work) - arcsin_ref(x, work)

    return gap


def discrepancy(
    order: int, beta: ParamValue, prec: PrecisionConfig
) -> DiscrepancyReport:
    """Analytic and numeric order-th derivative of f_beta - arcsin at 0.

    Raises:
        ParameterError: If order is outside 0..5 or beta <= 0.
    """
    analytic = analytic_discrepancy(order, beta, prec)
    b = _positive("beta", beta, derivative_precision(prec).mantissa_bits)
    estimate = numeric_derivative(_gap_to_arcsin(b, prec), 0, order, prec)
    with mp.workprec(prec.mantissa_bits):
        abs_diff = abs(analytic - estimate.value)
    return DiscrepancyReport(
        order=order,
        beta=to_decimal(b, prec),
        analytic=to_decimal(analytic, prec),
        numeric=to_decimal(estimate.value, prec),
        numeric_error=to_decimal(estimate.error, prec),
        abs_diff=to_decimal(abs_diff, prec),
    )


def discrepancy_table(
    beta: ParamValue, prec: PrecisionConfig, orders: Optional[List[int]] = None
) -> List[DiscrepancyReport]:
    return [discrepancy(k, beta, prec) for k in (orders or range(MAX_ORDER + 1))]


def endpoint_value(b: Real, prec: PrecisionConfig) -> mpf:
    """f_b(1) = (b+2) sqrt(2) / (b + sqrt(2))."""
    return eval_matched(b, 1, prec)


def endpoint_inverse(target: Real, prec: PrecisionConfig) -> mpf:
    """Closed-form b with f_b(1) = target: b = sqrt(2)(2 - t)/(t - sqrt(2))."""
    with mp.workprec(prec.mantissa_bits + GUARD_BITS):
        t = to_mpf(target)
        sqrt2 = mp.sqrt(2)
        if not sqrt2 < t < 2:
            raise NoSolutionError(
                f"f_b(1) = {mp.nstr(t, 15)} has no solution b > 0; "
                "the range of f_b(1) is (sqrt(2), 2)"
            )
        b = sqrt2 * (2 - t) / (t - sqrt2)
    with mp.workprec(prec.mantissa_bits):
        return +b


def solve_endpoint(
    prec: PrecisionConfig, target: Optional[Real] = None
) -> mpf:
    """Solve f_b(1) = target for b, by root finding and in closed form.

    The target defaults to pi/2, whose solution is b1. Both routes must agree
    to 2^-(bits - solver_guard_bits) relative, and for pi/2 they must also
    agree with sqrt(2)(4 - pi)/(pi - 2 sqrt(2)).

    Raises:
        NoSolutionError: If b -> f_b(1) does not reach target on
            (sqrt(2)/1000, 1000).
        CertificationError: If the two routes disagree.
    """
    bits = prec.mantissa_bits
    work = prec.with_bits(min(bits + GUARD_BITS, 4096))
    with mp.workprec(work.mantissa_bits):
        t = const_pi(work) / 2 if target is None else to_mpf(target)
        lo = mp.sqrt(2) * mpf(B_BRACKET_LO)
        hi = mpf(B_BRACKET_HI)

        def residual(b: mpf) -> mpf:
            return endpoint_value(b, work) - t

        try:
            lo, hi = bisect(residual, lo, hi, work.solver_exponent)
        except BracketError:
            raise NoSolutionError(
                f"f_b(1) = {mp.nstr(t, 15)} has no solution for b in "
                f"({mp.nstr(lo, 6)}, {mp.nstr(hi, 6)})"
            ) from None
        root = secant_polish(residual, lo, hi)

        closed = endpoint_inverse(t, work)
        checks = [("endpoint_inverse", closed)]
        if target is None:
            b1 = resolve_parameter(ConstantName.B1, work.mantissa_bits)
            checks.append(("b1", b1))
        limit = tolerance(prec.solver_exponent) * abs(root)
        for name, other in checks:
            if abs(root - other) > limit:
                raise CertificationError(
                    f"root finding gives b = {mp.nstr(root, 20)} but {name} gives "
                    f"{mp.nstr(other, 20)}"
                )

    logger.info("solved endpoint condition", b=mp.nstr(root, 15), target=mp.nstr(t, 15))
    with mp.workprec(bits):
        return +root


def endpoint_solution(
    prec: PrecisionConfig, target: Optional[Real] = None
) -> EndpointSolution:
    """solve_endpoint packaged with its closed-form counterpart."""
    b = solve_endpoint(prec, target)
    with mp.workprec(prec.mantissa_bits):
        t = const_pi(prec) / 2 if target is None else to_mpf(target)
        closed = endpoint_inverse(t, prec)
        return EndpointSolution(
            target=to_decimal(t, prec),
            b=to_decimal(b, prec),
            closed_form_b=to_decimal(closed, prec),
            abs_diff=to_decimal(abs(b - closed), prec),
            precision_bits=prec.mantissa_bits,
        )


def optimality_report(
    prec: PrecisionConfig,
    lower_b: Optional[Real] = None,
    upper_b: Optional[Real] = None,
) -> OptimalityReport:
    """Evidence that f_b1 is the least upper bound and f_4 the greatest lower bound.

    ``lower_b`` must lie in (b1, 4), default (b1 + 4)/2; ``upper_b`` must
    exceed b1, default b1 + 0.1.

    Raises:
        ParameterError: If a sampled parameter is outside its range.
        CertificationError: If a sign condition fails.
    """
    bits = prec.mantissa_bits
    b1 = solve_endpoint(prec)
    with mp.workprec(bits + GUARD_BITS):
        half_pi = const_pi(prec.with_bits(min(bits + GUARD_BITS, 4096))) / 2
        b1_at_one = eval_bound(BoundSpec.matched(ConstantName.B1), 1, prec)
        residual = abs(b1_at_one - half_pi)

        if upper_b is None:
            b_up = b1 + mpf(str(UPPER_WITNESS_OFFSET))
        else:
            b_up = to_mpf(upper_b)
        if not b_up > b1:
            raise ParameterError(
                f"upper witness parameter must exceed b1, got {upper_b}"
            )
        gap = half_pi - endpoint_value(b_up, prec)
        if not gap > 0:
            raise CertificationError(
                f"f_b(1) >= pi/2 for b = {mp.nstr(b_up, 15)} above b1"
            )

        b_low = (b1 + 4) / 2 if lower_b is None else to_mpf(lower_b)

    counterexample = lower_counterexample(b_low, prec)
    logger.info(
        "optimality evidence collected",
        b1=mp.nstr(b1, 15),
        endpoint_residual=mp.nstr(residual, 5),
    )
    return OptimalityReport(
        b1=to_decimal(b1, prec),
        endpoint_residual=to_decimal(residual, prec),
        upper_strictness_witness=UpperWitness(
            b=to_decimal(b_up, prec), x=Decimal(1), gap=to_decimal(gap, prec)
        ),
        lower_counterexample=counterexample,
        precision_bits=bits,
    )


def _shafer(b: mpf, x: Union[mpf, int], prec: PrecisionConfig) -> mpf:
    with mp.workprec(prec.mantissa_bits + GUARD_BITS):
        alpha = b + 1
    return eval_family(BoundFamily.ALGEBRAIC_SHAFER, alpha, b, x, prec)


def algebraic_optimality(
    prec: PrecisionConfig,
    upper_b: Optional[Real] = None,
    lower_b: Optional[Real] = None,
) -> AlgebraicOptimalityReport:
    """Evidence for the optimal constants 2 and 2/(pi - 2) of (b+1)x/(b + sqrt(1-x^2)).

    * b = 2/(pi - 2) meets arcsin at x = 1; a larger ``upper_b`` (default
      2/(pi - 2) + 0.1) falls below pi/2 there.
    * b = 2 has a vanishing cubic Taylor discrepancy; a smaller ``lower_b``
      (default 1.9) exceeds arcsin near 0.

    Raises:
        ParameterError: If a sampled parameter is on the wrong side.
        CertificationError: If a sign or residual condition fails.
    """
    bits = prec.mantissa_bits
    work = prec.with_bits(min(bits + GUARD_BITS, 4096))
    with mp.workprec(work.mantissa_bits):
        half_pi = const_pi(work) / 2
        b_exact = resolve_parameter(ConstantName.MALESEVIC_B, work.mantissa_bits)
        upper_residual = abs(_shafer(b_exact, 1, work) - half_pi)

        if upper_b is None:
            b_up = b_exact + mpf(str(UPPER_WITNESS_OFFSET))
        else:
            b_up = to_mpf(upper_b)
        if not b_up > b_exact:
            raise ParameterError(
                f"upper witness parameter must exceed 2/(pi - 2), got {upper_b}"
            )
        upper_gap = half_pi - _shafer(b_up, 1, work)
        if not upper_gap > 0:
            raise CertificationError(f"(b+1)/b >= pi/2 for b = {mp.nstr(b_up, 15)}")

        if lower_b is None:
            b_low = 2 - mpf(str(ALGEBRAIC_LOWER_OFFSET))
        else:
            b_low = to_mpf(lower_b)
        if not 0 < b_low < 2:
            raise ParameterError(
                f"lower witness parameter must lie in (0, 2), got {lower_b}"
            )

    dwork = derivative_precision(prec)

    def cubic_gap(x: mpf) -> mpf:
        return _shafer(mpf(2), x, dwork) - arcsin_ref(x, dwork)

    cubic = numeric_derivative(cubic_gap, 0, 3, prec)
    if abs(cubic.value) > NUMERIC_ZERO:
        raise CertificationError(
            f"third derivative of f_2 - arcsin at 0 is {mp.nstr(cubic.value, 10)},"
            " not 0"
        )

    # the cubic term (2 - b)/(6(b + 1)) x^3 dominates for small enough x
    with mp.workprec(work.mantissa_bits):
        lower_x, lower_gap = None, None
        for k in range(3, 41):
            x = mp.ldexp(mpf(1), -k)
            gap = _shafer(b_low, x, work) - arcsin_ref(x, work)
            if gap > 0:
                lower_x, lower_gap = x, gap
                break
    if lower_x is None or lower_gap is None:
        raise CertificationError(
            f"no x in [2^-40, 1/8] where b = {mp.nstr(b_low, 15)} exceeds arcsin"
        )

    logger.info(
        "algebraic optimality evidence collected",
        upper_residual=mp.nstr(upper_residual, 5),
        lower_x=mp.nstr(lower_x, 10),
    )
    return AlgebraicOptimalityReport(
        lower_b=Decimal(2),
        upper_b=to_decimal(b_exact, prec),
        upper_endpoint_residual=to_decimal(upper_residual, prec),
        lower_cubic_discrepancy=to_decimal(cubic.value, prec),
        upper_witness=UpperWitness(
            b=to_decimal(b_up, prec), x=Decimal(1), gap=to_decimal(upper_gap, prec)
        ),
        lower_witness=UpperWitness(
            b=to_decimal(b_low, prec),
            x=to_decimal(lower_x, prec),
            gap=to_decimal(lower_gap, prec),
        ),
        precision_bits=bits,
    )
