"""Extended-precision reference values.

Everything here runs on mpmath at the mantissa width of a PrecisionConfig.
Each call opens its own ``mp.workprec`` block, so results do not depend on
the precision the caller happens to have set.

Example usage:
    from arcsin_bounds_shared.types import PrecisionConfig
    from arcsin_bounds_toolkit.core.oracle import arcsin_ref, numeric_derivative

    prec = PrecisionConfig(mantissa_bits=256)
    arcsin_ref("0.5", prec)                       # pi/6
    numeric_derivative(lambda x: x**2, "0.3", 2, prec).value   # 2
"""

import math
from decimal import Decimal
from enum import Enum
from typing import Callable, NamedTuple, Tuple, Union

import structlog
from mpmath import mp, mpf

from arcsin_bounds_shared.types.precision import PrecisionConfig

logger = structlog.get_logger(__name__)

Real = Union[mpf, int, float, str, Decimal]

GUARD_BITS = 16
MAX_MANTISSA_BITS = 4096

# Difference tableau: step halves each level, stop once the extrapolated
# value gets worse by SAFE over the best seen so far.
TABLEAU_LEVELS = 14
SAFE = 2
ROUNDOFF_FACTOR = 64


class DomainError(ValueError):
    """Raised when an argument lies outside the domain of a function."""

    pass


class StepCollapseError(ValueError):
    """Raised when no difference stencil fits inside the domain."""

    pass


class Stencil(str, Enum):
    CENTRAL = "central"
    FORWARD = "forward"
    BACKWARD = "backward"


class DerivativeEstimate(NamedTuple):
    value: mpf
    error: mpf
    stencil: Stencil
    levels: int


def to_mpf(value: Real) -> mpf:
    """Convert to mpf at the current precision; decimals go through their text."""
    if isinstance(value, Decimal):
        return mpf(str(value))
    return mpf(value)


def to_decimal(value: mpf, prec: PrecisionConfig) -> Decimal:
    """Decimal with as many significant digits as the mantissa carries."""
    with mp.workprec(prec.mantissa_bits):
        return Decimal(mp.nstr(to_mpf(value), prec.decimal_digits))


def tolerance(exponent: int) -> mpf:
    """2^-exponent as an mpf."""
    return mp.ldexp(mpf(1), -exponent)


def check_interval(x: Real, lo: Real = 0, hi: Real = 1) -> mpf:
    """Convert x and make sure lo <= x <= hi."""
    value = to_mpf(x)
    if not to_mpf(lo) <= value <= to_mpf(hi):
        raise DomainError(f"x = {mp.nstr(value, 15)} lies outside [{lo}, {hi}]")
    return value


def derivative_precision(prec: PrecisionConfig) -> PrecisionConfig:
    """Precision at which functions handed to numeric_derivative should evaluate."""
    bits = prec.mantissa_bits + prec.tolerance_policy.derivative_extra_bits
    return prec.with_bits(min(bits, MAX_MANTISSA_BITS))


def const_pi(prec: PrecisionConfig) -> mpf:
    with mp.workprec(prec.mantissa_bits):
        return +mp.pi


def const_sqrt2(prec: PrecisionConfig) -> mpf:
    with mp.workprec(prec.mantissa_bits):
        return mp.sqrt(2)


def arcsin_ref(x: Real, prec: PrecisionConfig) -> mpf:
    """Reference arcsin on [0, 1].

    Uses arcsin x = atan(x / sqrt(1-x^2)) below 0.9 and
    pi/2 - atan(sqrt(1-x^2) / x) above, with sqrt(1-x^2) formed as
    sqrt(1-x) sqrt(1+x).

    Raises:
        DomainError: If x lies outside [0, 1].
    """
    with mp.workprec(prec.mantissa_bits + GUARD_BITS):
        x = check_interval(x)
        if x == 0:
            result = mpf(0)
        elif x == 1:
            result = mp.pi / 2
        else:
            y = mp.sqrt(1 - x) * mp.sqrt(1 + x)
            if 10 * x > 9:
                result = mp.pi / 2 - mp.atan(y / x)
            else:
                result = mp.atan(x / y)
    with mp.workprec(prec.mantissa_bits):
        return +result


def sin_ref(t: Real, prec: PrecisionConfig) -> mpf:
    """sin on [0, pi/2]; only used to round-trip arcsin_ref."""
    with mp.workprec(prec.mantissa_bits + GUARD_BITS):
        value = mp.sin(to_mpf(t))
    with mp.workprec(prec.mantissa_bits):
        return +value


def _choose_stencil(
    x0: mpf, order: int, h: mpf, domain: Tuple[mpf, mpf]
) -> Stencil:
    lo, hi = domain
    reach = order * h
    if x0 - reach / 2 >= lo and x0 + reach / 2 <= hi:
        return Stencil.CENTRAL
    if x0 + reach <= hi:
        return Stencil.FORWARD
    if x0 - reach >= lo:
        return Stencil.BACKWARD
    raise StepCollapseError(
        f"order-{order} stencil with step {mp.nstr(h, 6)} does not fit in "
        f"[{mp.nstr(lo, 6)}, {mp.nstr(hi, 6)}] around {mp.nstr(x0, 10)}"
    )


def _nodes(x0: mpf, order: int, h: mpf, stencil: Stencil) -> list:
    if stencil is Stencil.CENTRAL:
        return [x0 + (mpf(order) / 2 - k) * h for k in range(order + 1)]
    if stencil is Stencil.FORWARD:
        return [x0 + (order - k) * h for k in range(order + 1)]
    return [x0 - k * h for k in range(order + 1)]


def numeric_derivative(
    f: Callable[[mpf], mpf],
    x0: Real,
    order: int,
    prec: PrecisionConfig,
    domain: Tuple[Real, Real] = (0, 1),
) -> DerivativeEstimate:
    """Estimate the order-th derivative of f at x0.

    Builds a Neville tableau of n-th differences with halving steps and
    Richardson extrapolation (powers of h^2 for central stencils, h for
    one-sided ones). Near the ends of ``domain`` the stencil switches to
    forward or backward differences so f is never sampled outside it.

    f is called inside a working precision of
    ``derivative_precision(prec).mantissa_bits`` bits; functions that take
    their own PrecisionConfig should be built with ``derivative_precision``.

    Args:
        f: Function of one mpf argument.
        x0: Point of differentiation.
        order: Derivative order, 0..5.
        prec: Target precision; ``derivative_step`` is the base step.
        domain: Interval f may be sampled on.

    Returns:
        Estimate with value, error estimate, stencil and tableau depth.

    Raises:
        DomainError: If x0 lies outside ``domain``.
        StepCollapseError: If no stencil fits inside ``domain``.
        ValueError: If order is outside 0..5.
    """
    if not 0 <= order <= 5:
        raise ValueError(f"derivative order must be in 0..5, got {order}")

    work_bits = derivative_precision(prec).mantissa_bits
    with mp.workprec(work_bits):
        lo, hi = to_mpf(domain[0]), to_mpf(domain[1])
        x0 = check_interval(x0, lo, hi)
        eps = tolerance(work_bits)

        if order == 0:
            value = f(x0)
            return DerivativeEstimate(
                value=value, error=abs(value) * eps, stencil=Stencil.CENTRAL, levels=0
            )

        h = mpf(prec.derivative_step)
        stencil = _choose_stencil(x0, order, h, (lo, hi))
        weights = [(-1) ** k * math.comb(order, k) for k in range(order + 1)]
        power = 2 if stencil is Stencil.CENTRAL else 1
        f_max = mpf(0)

        def difference(step: mpf) -> mpf:
            nonlocal f_max
            values = [f(node) for node in _nodes(x0, order, step, stencil)]
            f_max = max([f_max] + [abs(v) for v in values])
            return mp.fsum(w * v for w, v in zip(weights, values)) / step**order

        tableau = [[difference(h)]]
        best, err = tableau[0][0], mp.inf
        levels = 1
        for i in range(1, TABLEAU_LEVELS):
            h = h / 2
            row = [difference(h)]
            for j in range(1, i + 1):
                factor = mpf(2) ** (power * j)
                prev = tableau[i - 1][j - 1]
                row.append(row[j - 1] + (row[j - 1] - prev) / (factor - 1))
                errt = max(abs(row[j] - row[j - 1]), abs(row[j] - prev))
                if errt <= err:
                    best, err = row[j], errt
            tableau.append(row)
            levels = i + 1
            if abs(row[i] - tableau[i - 1][i - 1]) >= SAFE * err:
                break

        roundoff = ROUNDOFF_FACTOR * 2**order * f_max * eps / h**order
        logger.debug(
            "numeric derivative",
            order=order,
            x0=mp.nstr(x0, 10),
            stencil=stencil.value,
            levels=levels,
        )
        return DerivativeEstimate(
            value=best, error=err + roundoff, stencil=stencil, levels=levels
        )
