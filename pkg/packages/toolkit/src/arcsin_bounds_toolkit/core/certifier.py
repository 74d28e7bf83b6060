"""Numeric certificate that f_b is an upper bound of arcsin on [0, 1].

With x = cos t and t = 4 atan u the difference f_b(x) - arcsin(x) becomes

    w(u) = sqrt(2)(b+2)(1 - 2u - u^2) / ((b - sqrt(2))u^2 + 2 sqrt(2)u + b + sqrt(2))
           - pi/2 + 4 atan(u),        u in [0, sqrt(2) - 1],

whose derivative is Q(u) / ((1 + u^2) D(u)^2) with a quartic Q. Q has the
double root sqrt(2) - 1 for every b, and its other two roots have closed
forms. w >= 0 is certified by evaluating w at the endpoints, at the critical
points inside the interval and at sentinel points between them.

The module also holds the counterpart for lower bounds: for b in (b1, 4),
g(x) = (f_b(x) - arcsin x)/x^3 is positive at 0 and negative at 1, so f_b
exceeds arcsin somewhere in (0, 1).
"""

from typing import List, Optional, Tuple, Union

import structlog
from mpmath import mp, mpf

from arcsin_bounds_shared.types.bounds import ConstantName, Parameter
from arcsin_bounds_shared.types.precision import PrecisionConfig
from arcsin_bounds_shared.types.reports import (
    CriticalPoint,
    LowerCounterexample,
    NonnegCertificate,
    SampleKind,
    SampledValue,
)
from arcsin_bounds_toolkit.core.bounds import (
    CertificationError,
    ParameterError,
    eval_matched,
    resolve_parameter,
)
from arcsin_bounds_toolkit.core.oracle import (
    GUARD_BITS,
    MAX_MANTISSA_BITS,
    Real,
    arcsin_ref,
    check_interval,
    to_decimal,
    tolerance,
)
from arcsin_bounds_toolkit.core.roots import (
    BracketError,
    bisect,
    scan_sign_changes,
    sign,
)

logger = structlog.get_logger(__name__)

POLISH_RADIUS = mpf("1e-3")
SENTINEL_COUNT = 32

# g(x) is evaluated from its Taylor limit below this point.
G_SERIES_CUTOFF_EXP = 20
G_EXTRA_BITS = 64
G_SCAN_CELLS = 64

BValue = Union[Parameter, Real]


class SingularDenominatorError(ArithmeticError):
    """Raised when the rational part of w has a vanishing denominator."""

    pass


class ComplexRootError(ArithmeticError):
    """Raised when the closed-form critical points are not real."""

    pass


def _work(prec: PrecisionConfig) -> int:
    return prec.mantissa_bits + GUARD_BITS


def _b(b: BValue, bits: int) -> mpf:
    value = resolve_parameter(b, bits)
    if not value > 0:
        raise ParameterError(f"b must be positive, got {b}")
    return value


def interval_end(prec: PrecisionConfig) -> mpf:
    """sqrt(2) - 1, the image of x = 0 under u = tan(arccos(x)/4).

    Rounded down so that it passes the domain check of w_eval at ``prec``.
    """
    with mp.workprec(_work(prec)):
        end = mp.sqrt(2) - 1
    return mp.fadd(end, 0, prec=prec.mantissa_bits, rounding="d")


def _check_u(u: Real) -> mpf:
    return check_interval(u, 0, mp.sqrt(2) - 1)


def _denominator(u: mpf, b: mpf) -> mpf:
    sqrt2 = mp.sqrt(2)
    d = (b - sqrt2) * u**2 + 2 * sqrt2 * u + b + sqrt2
    if d == 0:
        raise SingularDenominatorError(
            f"denominator of w vanishes at u = {mp.nstr(u, 15)}"
            f" for b = {mp.nstr(b, 15)}"
        )
    return d


def w_eval(u: Real, b: BValue, prec: PrecisionConfig) -> mpf:
    """w(u) in closed form.

    Raises:
        DomainError: If u lies outside [0, sqrt(2) - 1].
        SingularDenominatorError: If the rational denominator vanishes.
    """
    with mp.workprec(_work(prec)):
        u = _check_u(u)
        b = _b(b, _work(prec))
        sqrt2 = mp.sqrt(2)
        rational = sqrt2 * (b + 2) * (1 - 2 * u - u**2) / _denominator(u, b)
        value = rational - mp.pi / 2 + 4 * mp.atan(u)
    with mp.workprec(prec.mantissa_bits):
        return +value


def w_by_composition(u: Real, b: BValue, prec: PrecisionConfig) -> mpf:
    """f_b(cos(4 atan u)) - arcsin(cos(4 atan u)), for cross-checking w_eval."""
    with mp.workprec(_work(prec)):
        u = _check_u(u)
        b = _b(b, _work(prec))
        x = mp.cos(4 * mp.atan(u))
        # rounding can push cos slightly out of [0, 1] at the ends
        x = min(max(x, mpf(0)), mpf(1))
        wide = prec.with_bits(min(_work(prec), MAX_MANTISSA_BITS))
        value = eval_matched(b, x, wide) - arcsin_ref(x, wide)
    with mp.workprec(prec.mantissa_bits):
        return +value


def quartic_coefficients(b: BValue, prec: PrecisionConfig) -> List[mpf]:
    """Coefficients of the numerator Q of w'(u), highest power first."""
    with mp.workprec(_work(prec)):
        b = _b(b, _work(prec))
        s = mp.sqrt(2)
        coeffs = [
            4 * b**2 + 2 * s * b**2 - 8 * b - 4 * s * b - 8,
            -4 * s * b**2 + 8 * s * b - 32,
            8 * b**2 - 16 * b - 16,
            -4 * s * b**2 + 8 * s * b + 32,
            4 * b**2 - 2 * s * b**2 - 8 * b + 4 * s * b - 8,
        ]
    with mp.workprec(prec.mantissa_bits):
        return [+c for c in coeffs]


def _polymul(p: List[mpf], q: List[mpf]) -> List[mpf]:
    # ascending powers
    out = [mpf(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, c in enumerate(q):
            out[i + j] += a * c
    return out


def _polyadd(p: List[mpf], q: List[mpf]) -> List[mpf]:
    n = max(len(p), len(q))
    p = p + [mpf(0)] * (n - len(p))
    q = q + [mpf(0)] * (n - len(q))
    return [a + c for a, c in zip(p, q)]


def quartic_from_composition(b: BValue, prec: PrecisionConfig) -> List[mpf]:
    """Q rebuilt as (N'D - ND')(1 + u^2) + 4D^2 from w = N/D - pi/2 + 4 atan u.

    Highest power first, comparable with quartic_coefficients.
    """
    with mp.workprec(_work(prec)):
        b = _b(b, _work(prec))
        s = mp.sqrt(2)
        k = s * (b + 2)
        n = [k, -2 * k, -k]
        d = [b + s, 2 * s, b - s]
        dn = [-2 * k, -2 * k]
        dd = [2 * s, 2 * (b - s)]
        wronskian = _polyadd(_polymul(dn, d), [-c for c in _polymul(n, dd)])
        q = _polyadd(
            _polymul(wronskian, [mpf(1), mpf(0), mpf(1)]),
            [4 * c for c in _polymul(d, d)],
        )
        q = (q + [mpf(0)] * 5)[:5]
    with mp.workprec(prec.mantissa_bits):
        return [+c for c in reversed(q)]


def _w_prime_at(u: mpf, b: mpf, coeffs: List[mpf]) -> mpf:
    return mp.polyval(coeffs, u) / ((1 + u**2) * _denominator(u, b) ** 2)


def w_prime(u: Real, b: BValue, prec: PrecisionConfig) -> mpf:
    """w'(u) = Q(u) / ((1 + u^2) D(u)^2).

    Raises:
        DomainError: If u lies outside [0, sqrt(2) - 1].
        SingularDenominatorError: If D vanishes at u.
    """
    wide = prec.with_bits(min(_work(prec), MAX_MANTISSA_BITS))
    with mp.workprec(_work(prec)):
        u = _check_u(u)
        b = _b(b, _work(prec))
        value = _w_prime_at(u, b, quartic_coefficients(b, wide))
    with mp.workprec(prec.mantissa_bits):
        return +value


def _closed_form_roots(b: mpf) -> Tuple[mpf, Optional[mpf]]:
    # with s = b^2 - 2b the radicand is -s(s - 8) and the quadratic factor's
    # leading coefficient is s + 2 sqrt(2) - 4
    sqrt2 = mp.sqrt(2)
    s = b**2 - 2 * b
    radicand = -(b**4) + 4 * b**3 + 4 * b**2 - 16 * b
    if radicand < 0:
        raise ComplexRootError(
            f"radicand {mp.nstr(radicand, 10)} < 0 for b = {mp.nstr(b, 15)}; "
            "the outer critical points are complex"
        )
    root = mp.sqrt(radicand)
    u1 = (s - 4 - 2 * sqrt2) / (2 * sqrt2 + root)
    den = s + 2 * sqrt2 - 4
    u4: Optional[mpf] = None
    if abs(den) > mp.ldexp(abs(s) + 4, -mp.prec // 2):
        u4 = (2 * sqrt2 + root) / den
    return u1, u4


def _polish(u: mpf, b: mpf, coeffs: List[mpf], exponent: int) -> Tuple[mpf, bool]:
    def f(v: mpf) -> mpf:
        return _w_prime_at(v, b, coeffs)

    lo, hi = u - POLISH_RADIUS, u + POLISH_RADIUS
    try:
        lo, hi = bisect(f, lo, hi, exponent)
    except (BracketError, SingularDenominatorError):
        logger.debug(
            "no sign change near critical point, keeping closed form",
            u=mp.nstr(u, 15),
        )
        return u, False
    return (lo + hi) / 2, True


def critical_points(b: BValue, prec: PrecisionConfig) -> List[CriticalPoint]:
    """Roots of Q: u1 and u4 from the closed forms and the double root sqrt(2) - 1.

    Simple roots are polished by bisection on w' within 1e-3; the double
    root has no sign change and is kept as is. u4 is left out where the
    quadratic factor degenerates to a linear one. Sorted ascending.

    Raises:
        ComplexRootError: If the radicand -b^4 + 4b^3 + 4b^2 - 16b is negative.
    """
    bits = _work(prec)
    wide = prec.with_bits(min(bits, MAX_MANTISSA_BITS))
    with mp.workprec(bits):
        b = _b(b, bits)
        coeffs = quartic_coefficients(b, wide)
        end = mp.sqrt(2) - 1
        u1, u4 = _closed_form_roots(b)

        candidates = [(u1, 1), (end, 2)]
        if u4 is not None:
            candidates.append((u4, 1))

        points = []
        scale = max(abs(c) for c in coeffs)
        for u, multiplicity in sorted(candidates, key=lambda pair: pair[0]):
            polished = False
            if multiplicity == 1:
                u, polished = _polish(u, b, coeffs, wide.solver_exponent)
            try:
                residual = abs(_w_prime_at(u, b, coeffs))
            except SingularDenominatorError:
                residual = mp.inf
            if residual > tolerance(prec.residual_exponent) * scale:
                logger.warning(
                    "critical point residual above tolerance",
                    u=mp.nstr(u, 15),
                    residual=mp.nstr(residual, 5),
                )
            points.append(
                CriticalPoint(
                    u=to_decimal(u, prec),
                    multiplicity=multiplicity,
                    in_interval=bool(0 <= u <= end),
                    w_prime_residual=to_decimal(residual, prec),
                    polished=polished,
                )
            )
    return points


def certify_upper_bound(
    b: BValue, prec: Optional[PrecisionConfig] = None
) -> NonnegCertificate:
    """Certify w(u) >= 0 on [0, sqrt(2) - 1], i.e. f_b(x) >= arcsin x on [0, 1].

    w is evaluated at both endpoints, at the critical points in the interval,
    at midpoints between consecutive knots and at evenly spaced sentinels.
    Any value below -2^-(bits - residual_guard_bits) is a violation; the
    verdict is true exactly when there are none. Complex critical points
    leave only endpoints and sentinels.
    """
    prec = prec or PrecisionConfig.certification()
    bits = prec.mantissa_bits
    with mp.workprec(_work(prec)):
        b_value = _b(b, _work(prec))
    end = interval_end(prec)

    try:
        crit = [cp for cp in critical_points(b_value, prec) if cp.in_interval]
    except ComplexRootError as e:
        logger.info("no real interior critical points", reason=str(e))
        crit = []

    with mp.workprec(bits):
        crit_u = sorted({min(max(mpf(str(cp.u)), mpf(0)), end) for cp in crit})
        knots = sorted({mpf(0), end, *crit_u})
        samples: List[Tuple[mpf, SampleKind]] = [
            (mpf(0), SampleKind.ENDPOINT),
            (end, SampleKind.ENDPOINT),
        ]
        samples += [(u, SampleKind.CRITICAL) for u in crit_u]
        samples += [
            ((lo + hi) / 2, SampleKind.SENTINEL) for lo, hi in zip(knots, knots[1:])
        ]
        samples += [
            (end * k / (SENTINEL_COUNT + 1), SampleKind.SENTINEL)
            for k in range(1, SENTINEL_COUNT + 1)
        ]

        floor = -tolerance(prec.residual_exponent)
        values = [(u, w_eval(u, b_value, prec), kind) for u, kind in samples]
        violations = [
            SampledValue(u=to_decimal(u, prec), value=to_decimal(v, prec), kind=kind)
            for u, v, kind in values
            if v < floor
        ]
        argmin_u, min_value, _ = min(values, key=lambda item: item[1])
        endpoint_values = (values[0][1], values[1][1])
        extremum_values = [v for _, v, kind in values if kind is SampleKind.CRITICAL]

    verdict = not violations
    logger.info(
        "upper bound certificate",
        b=mp.nstr(b_value, 15),
        verdict=verdict,
        min_value=mp.nstr(min_value, 5),
        samples=len(values),
    )
    return NonnegCertificate(
        b=to_decimal(b_value, prec),
        interval=(to_decimal(mpf(0), prec), to_decimal(end, prec)),
        critical_points=[to_decimal(u, prec) for u in crit_u],
        endpoint_values=(
            to_decimal(endpoint_values[0], prec),
            to_decimal(endpoint_values[1], prec),
        ),
        extremum_values=[to_decimal(v, prec) for v in extremum_values],
        min_value=to_decimal(min_value, prec),
        argmin_u=to_decimal(argmin_u, prec),
        verdict=verdict,
        violations=violations,
        sample_count=len(values),
        precision_used=bits,
    )


def g_ratio(x: Real, b: BValue, prec: PrecisionConfig) -> mpf:
    """g(x) = (f_b(x) - arcsin x)/x^3, with g(x) = (4 - b)/(24(2 + b)) for x < 2^-20."""
    bits = prec.mantissa_bits
    wide = prec.with_bits(min(bits + G_EXTRA_BITS, MAX_MANTISSA_BITS))
    with mp.workprec(wide.mantissa_bits):
        x = check_interval(x)
        b = _b(b, wide.mantissa_bits)
        if x < mp.ldexp(mpf(1), -G_SERIES_CUTOFF_EXP):
            value = (4 - b) / (24 * (2 + b))
        else:
            value = (eval_matched(b, x, wide) - arcsin_ref(x, wide)) / x**3
    with mp.workprec(bits):
        return +value


def lower_counterexample(b: BValue, prec: PrecisionConfig) -> LowerCounterexample:
    """Show that f_b with b in (b1, 4) is not a lower bound of arcsin.

    g is scanned from 0 for its first sign change c_b, which is then
    bisected; xi = c_b/2 is a point in (0, c_b) where g > 0.

    Raises:
        ParameterError: If b is not in (b1, 4).
        CertificationError: If g(0) > 0, g(1) < 0 or g(xi) > 0 fails.
    """
    bits = prec.mantissa_bits
    with mp.workprec(bits + GUARD_BITS):
        b_value = _b(b, bits + GUARD_BITS)
        b1 = resolve_parameter(ConstantName.B1, bits + GUARD_BITS)
        if not b1 < b_value < 4:
            raise ParameterError(f"b must lie in (b1, 4), got {mp.nstr(b_value, 15)}")

    def g(x: mpf) -> mpf:
        return g_ratio(x, b_value, prec)

    with mp.workprec(bits):
        g0, g1 = g(mpf(0)), g(mpf(1))
        if not (g0 > 0 and g1 < 0):
            raise CertificationError(
                f"expected g(0) > 0 > g(1) for b = {mp.nstr(b_value, 15)}, "
                f"got {mp.nstr(g0, 10)} and {mp.nstr(g1, 10)}"
            )
        points = [mpf(k) / G_SCAN_CELLS for k in range(G_SCAN_CELLS + 1)]
        cells, values = scan_sign_changes(g, points)
        if not cells:
            raise CertificationError(
                f"no sign change of g found for b = {mp.nstr(b_value, 15)}"
            )
        i, j = cells[0]
        lo, hi = bisect(
            g, points[i], points[j], prec.solver_exponent, values[i], values[j]
        )
        c_b = (lo + hi) / 2
        xi = c_b / 2
        g_xi = g(xi)
        if not sign(g_xi) > 0:
            raise CertificationError(
                f"g(xi) = {mp.nstr(g_xi, 10)} is not positive"
                f" for b = {mp.nstr(b_value, 15)}"
            )

    logger.info(
        "lower bound counterexample",
        b=mp.nstr(b_value, 15),
        c_b=mp.nstr(c_b, 15),
    )
    return LowerCounterexample(
        b=to_decimal(b_value, prec),
        g_at_zero=to_decimal(g0, prec),
        g_at_one=to_decimal(g1, prec),
        c_b=to_decimal(c_b, prec),
        xi=to_decimal(xi, prec),
        g_at_xi=to_decimal(g_xi, prec),
    )
