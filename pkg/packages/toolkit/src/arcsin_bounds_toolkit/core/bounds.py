"""Bound families for arcsin on [0, 1] and the constants of the theorems.

Two evaluation paths share the same BoundSpec: ``eval_bound`` runs on mpmath
at the requested mantissa width, ``fast_evaluator`` returns a numpy float64
function for benchmarking.
"""

from decimal import Decimal, InvalidOperation
from functools import lru_cache
from typing import Callable, Dict, List, NamedTuple, Sequence, Tuple, Union

import numpy as np
import structlog
from mpmath import mp, mpf
from numpy.typing import ArrayLike, NDArray
from pydantic import ValidationError

from arcsin_bounds_shared.types.bounds import (
    BoundFamily,
    BoundSpec,
    ConstantName,
    Curve,
    NamedConstant,
    Ordering,
    Parameter,
    ReferenceCurve,
)
from arcsin_bounds_shared.types.precision import PrecisionConfig
from arcsin_bounds_toolkit.core.oracle import (
    GUARD_BITS,
    DomainError,
    Real,
    arcsin_ref,
    check_interval,
    to_decimal,
    to_mpf,
)
from arcsin_bounds_toolkit.core.roots import bisect

logger = structlog.get_logger(__name__)

FLOAT_BITS = 53


class ParameterError(ValueError):
    """Raised when bound parameters violate their invariants."""

    pass


class CertificationError(RuntimeError):
    """Raised when a sign condition that must hold is not met numerically."""

    pass


CLOSED_FORMS: Dict[ConstantName, str] = {
    ConstantName.SHAFER_B: "2",
    ConstantName.MALESEVIC_B: "2/(pi - 2)",
    ConstantName.SHAFER_BETA: "4",
    ConstantName.B1: "sqrt(2)(4 - pi)/(pi - 2 sqrt(2))",
    ConstantName.ZHU_ALPHA: "pi(sqrt(2) + 1/2), paired with denominator offset 4",
    ConstantName.CROSSOVER_C: (
        "unique root in (0, 1) of malesevic_algebraic_upper - zhu_upper"
    ),
    ConstantName.PI: "pi",
}

# pi is a parameter reference only, not a constant of the theorems.
TABLE_CONSTANTS: Tuple[ConstantName, ...] = (
    ConstantName.SHAFER_B,
    ConstantName.MALESEVIC_B,
    ConstantName.SHAFER_BETA,
    ConstantName.B1,
    ConstantName.ZHU_ALPHA,
    ConstantName.CROSSOVER_C,
)

NAMED_BOUNDS: Dict[str, BoundSpec] = {
    "shafer_algebraic_lower": BoundSpec.shafer(ConstantName.SHAFER_B),
    "shafer_sqrt_lower": BoundSpec.matched(ConstantName.SHAFER_BETA),
    "malesevic_algebraic_upper": BoundSpec.shafer(ConstantName.MALESEVIC_B),
    "malesevic_sqrt_upper": BoundSpec.matched(ConstantName.B1),
    "zhu_upper": BoundSpec.sqrt_two_param(
        ConstantName.ZHU_ALPHA, ConstantName.SHAFER_BETA
    ),
    "fink_upper": BoundSpec.algebraic_two_param(ConstantName.PI, Decimal(2)),
}

ARCSIN = ReferenceCurve.ARCSIN.value

# Each chain is nondecreasing left to right on [0, 1].
THEOREM_CHAINS: Dict[str, Tuple[str, ...]] = {
    "shafer": ("shafer_algebraic_lower", "shafer_sqrt_lower", ARCSIN),
    "fink": ("shafer_algebraic_lower", ARCSIN, "fink_upper"),
    "malesevic_algebraic": (
        "shafer_algebraic_lower",
        ARCSIN,
        "malesevic_algebraic_upper",
        "fink_upper",
    ),
    "zhu": (
        "shafer_algebraic_lower",
        "shafer_sqrt_lower",
        ARCSIN,
        "zhu_upper",
        "fink_upper",
    ),
    "main": (
        "shafer_algebraic_lower",
        "shafer_sqrt_lower",
        ARCSIN,
        "malesevic_sqrt_upper",
        "zhu_upper",
        "fink_upper",
    ),
    "sqrt_vs_algebraic": (ARCSIN, "malesevic_sqrt_upper", "malesevic_algebraic_upper"),
}
MAIN_CHAIN = "main"


class ResolvedSpec(NamedTuple):
    family: BoundFamily
    alpha: mpf
    beta: mpf


@lru_cache(maxsize=32)
def _closed_form_values(bits: int) -> Dict[ConstantName, mpf]:
    with mp.workprec(bits + GUARD_BITS):
        pi = +mp.pi
        sqrt2 = mp.sqrt(2)
        raw = {
            ConstantName.SHAFER_B: mpf(2),
            ConstantName.MALESEVIC_B: 2 / (pi - 2),
            ConstantName.SHAFER_BETA: mpf(4),
            ConstantName.B1: sqrt2 * (4 - pi) / (pi - 2 * sqrt2),
            ConstantName.ZHU_ALPHA: pi * (sqrt2 + mpf(1) / 2),
            ConstantName.PI: pi,
        }
    with mp.workprec(bits):
        return {name: +value for name, value in raw.items()}


@lru_cache(maxsize=32)
def _crossover_constant(bits: int) -> mpf:
    prec = PrecisionConfig(mantissa_bits=bits)
    left = NAMED_BOUNDS["malesevic_algebraic_upper"]
    right = NAMED_BOUNDS["zhu_upper"]

    def gap(x: mpf) -> mpf:
        return eval_bound(left, x, prec) - eval_bound(right, x, prec)

    with mp.workprec(bits):
        lo, hi = bisect(gap, mpf("0.25"), mpf("0.5"), prec.solver_exponent)
        return (lo + hi) / 2


def resolve_parameter(value: Union[Parameter, Real], bits: int) -> mpf:
    """Numeric value of a parameter (named constant or number) at ``bits``."""
    if isinstance(value, ConstantName):
        if value is ConstantName.CROSSOVER_C:
            return _crossover_constant(max(bits, 64))
        return _closed_form_values(bits)[value]
    with mp.workprec(bits):
        return to_mpf(value)


def resolve_spec(spec: BoundSpec, bits: int) -> ResolvedSpec:
    """Resolve a spec to numeric (alpha, beta) with the family's matching rule."""
    with mp.workprec(bits):
        beta = resolve_parameter(spec.beta, bits)
        if spec.family is BoundFamily.ALGEBRAIC_SHAFER:
            alpha = beta + 1
        elif spec.family is BoundFamily.SQRT_MATCHED:
            alpha = beta + 2
        else:
            if spec.alpha is None:
                raise ParameterError(f"{spec.family.value} requires alpha")
            alpha = resolve_parameter(spec.alpha, bits)
    if not (alpha > 0 and beta > 0):
        raise ParameterError(f"parameters of {spec.label()} must be positive")
    return ResolvedSpec(family=spec.family, alpha=alpha, beta=beta)


def _family_value(r: ResolvedSpec, x: mpf, sp: mpf, sm: mpf) -> mpf:
    # sp = sqrt(1+x), sm = sqrt(1-x); sqrt(1-x^2) = sp*sm and
    # sp - sm = 2x/(sp + sm) keep full relative accuracy at both ends.
    if r.family.is_algebraic:
        return r.alpha * x / (r.beta + sp * sm)
    return r.alpha * (2 * x / (sp + sm)) / (r.beta + sp + sm)


def eval_bound(spec: BoundSpec, x: Real, prec: PrecisionConfig) -> mpf:
    """Value of the bound family at x in [0, 1].

    Raises:
        DomainError: If x lies outside [0, 1].
        ParameterError: If the resolved parameters are not positive.
    """
    bits = prec.mantissa_bits
    with mp.workprec(bits + GUARD_BITS):
        x = check_interval(x)
        r = resolve_spec(spec, bits + GUARD_BITS)
        value = _family_value(r, x, mp.sqrt(1 + x), mp.sqrt(1 - x))
    with mp.workprec(bits):
        return +value


def eval_family(
    family: BoundFamily, alpha: Real, beta: Real, x: Real, prec: PrecisionConfig
) -> mpf:
    """Like eval_bound, for numeric parameters that are not a BoundSpec.

    ``alpha`` is used as given; the caller applies the family's matching rule.
    """
    bits = prec.mantissa_bits
    with mp.workprec(bits + GUARD_BITS):
        x = check_interval(x)
        r = ResolvedSpec(family=family, alpha=to_mpf(alpha), beta=to_mpf(beta))
        if not (r.alpha > 0 and r.beta > 0):
            raise ParameterError(f"parameters of {family.value} must be positive")
        value = _family_value(r, x, mp.sqrt(1 + x), mp.sqrt(1 - x))
    with mp.workprec(bits):
        return +value


def eval_matched(b: Real, x: Real, prec: PrecisionConfig) -> mpf:
    """f_b(x), the square-root family with alpha = b + 2."""
    with mp.workprec(prec.mantissa_bits + GUARD_BITS):
        b = to_mpf(b)
        alpha = b + 2
    return eval_family(BoundFamily.SQRT_MATCHED, alpha, b, x, prec)


def curve_spec(label: str) -> Curve:
    if label == ARCSIN:
        return ReferenceCurve.ARCSIN
    try:
        return NAMED_BOUNDS[label]
    except KeyError:
        raise ParameterError(f"unknown bound label '{label}'") from None


def curve_label(curve: Curve) -> str:
    if isinstance(curve, ReferenceCurve):
        return curve.value
    for label, spec in NAMED_BOUNDS.items():
        if spec == curve:
            return label
    return curve.label()


def parse_parameter(text: str) -> Parameter:
    """A constant name such as ``b1`` or ``pi``, else a decimal literal."""
    text = text.strip()
    try:
        return ConstantName(text)
    except ValueError:
        pass
    try:
        value = Decimal(text)
    except InvalidOperation:
        raise ParameterError(
            f"'{text}' is neither a number nor a named constant"
        ) from None
    if not value.is_finite():
        raise ParameterError(f"parameter must be finite, got '{text}'")
    return value


def parse_curve(text: str) -> Curve:
    """Parse ``arcsin``, a named bound, or ``family:alpha=..,beta=..``.

    Parameter values are decimals or constant names (``b1``, ``pi``, ...).
    """
    text = text.strip()
    if text == ARCSIN or text in NAMED_BOUNDS:
        return curve_spec(text)
    family_text, _, params_text = text.partition(":")
    try:
        family = BoundFamily(family_text.strip())
    except ValueError:
        raise ParameterError(f"unknown curve '{text}'") from None
    params: Dict[str, str] = {}
    for item in filter(None, (part.strip() for part in params_text.split(","))):
        key, sep, value = item.partition("=")
        if not sep or key.strip() not in ("alpha", "beta"):
            raise ParameterError(f"malformed parameter '{item}' in '{text}'")
        params[key.strip()] = value.strip()
    try:
        return BoundSpec.model_validate({"family": family, **params})
    except ValidationError as e:
        raise ParameterError(f"invalid bound '{text}': {e}") from e


def eval_curves(
    curves: Sequence[Curve], x: Real, prec: PrecisionConfig
) -> List[mpf]:
    """Evaluate several curves at one point, sharing the square roots."""
    bits = prec.mantissa_bits
    with mp.workprec(bits + GUARD_BITS):
        x = check_interval(x)
        sp, sm = mp.sqrt(1 + x), mp.sqrt(1 - x)
        raw = []
        for curve in curves:
            if isinstance(curve, ReferenceCurve):
                raw.append(arcsin_ref(x, prec))
            else:
                r = resolve_spec(curve, bits + GUARD_BITS)
                raw.append(_family_value(r, x, sp, sm))
    with mp.workprec(bits):
        return [+value for value in raw]


def eval_curve(curve: Curve, x: Real, prec: PrecisionConfig) -> mpf:
    return eval_curves([curve], x, prec)[0]


def chain_curves(theorem: str = MAIN_CHAIN) -> List[Curve]:
    try:
        labels = THEOREM_CHAINS[theorem]
    except KeyError:
        raise ParameterError(
            f"unknown theorem chain '{theorem}'. "
            f"Known chains are: {', '.join(THEOREM_CHAINS)}"
        ) from None
    return [curve_spec(label) for label in labels]


def eval_chain(x: Real, prec: PrecisionConfig, theorem: str = MAIN_CHAIN) -> List[mpf]:
    """Chain members at x, in chain order (lower bounds, arcsin, upper bounds).

    The main chain has six members: Shafer's algebraic and square-root lower
    bounds, arcsin, f_b1, Zhu's upper bound and Fink's upper bound.
    """
    return eval_curves(chain_curves(theorem), x, prec)


def fast_evaluator(spec: BoundSpec) -> Callable[[ArrayLike], NDArray[np.float64]]:
    """Machine-precision evaluator with parameters resolved once."""
    r = resolve_spec(spec, FLOAT_BITS)
    alpha, beta = float(r.alpha), float(r.beta)
    algebraic = r.family.is_algebraic

    def evaluate(x: ArrayLike) -> NDArray[np.float64]:
        values = np.asarray(x, dtype=np.float64)
        if not np.all((values >= 0.0) & (values <= 1.0)):
            raise DomainError("fast path arguments must lie in [0, 1]")
        sp = np.sqrt(1.0 + values)
        sm = np.sqrt(1.0 - values)
        if algebraic:
            return alpha * values / (beta + sp * sm)
        return alpha * (2.0 * values / (sp + sm)) / (beta + sp + sm)

    return evaluate


def eval_bound_fast(spec: BoundSpec, x: ArrayLike) -> NDArray[np.float64]:
    return fast_evaluator(spec)(x)


def compare_pointwise(
    a: BoundSpec, b: BoundSpec, x: Real, prec: PrecisionConfig
) -> Ordering:
    """Order of two square-root family bounds at x in (0, 1].

    Decided by the equivalence
        Phi_a > Phi_b  <=>  alpha_a beta_b - alpha_b beta_a
                              > (alpha_b - alpha_a)(sqrt(1+x) + sqrt(1-x))
    and cross-checked against direct evaluation. Margins within
    2^-(bits - equality_guard_bits) of the terms' scale count as Equal.

    Raises:
        ParameterError: If either spec is not a square-root family.
        DomainError: If x lies outside (0, 1].
        CertificationError: If predicate and direct evaluation disagree.
    """
    for spec in (a, b):
        if spec.family.is_algebraic:
            raise ParameterError(
                f"compare_pointwise needs square-root family bounds, got {spec.label()}"
            )
    bits = prec.mantissa_bits
    with mp.workprec(bits + GUARD_BITS):
        x = check_interval(x)
        if x == 0:
            raise DomainError("compare_pointwise is defined on (0, 1]")
        ra = resolve_spec(a, bits + GUARD_BITS)
        rb = resolve_spec(b, bits + GUARD_BITS)
        sp, sm = mp.sqrt(1 + x), mp.sqrt(1 - x)
        s = sp + sm
        margin = ra.alpha * rb.beta - rb.alpha * ra.beta - (rb.alpha - ra.alpha) * s
        scale = ra.alpha * rb.beta + rb.alpha * ra.beta + (ra.alpha + rb.alpha) * s
        predicate = _ordering(margin, mp.ldexp(scale, -prec.equality_exponent))

        va = _family_value(ra, x, sp, sm)
        vb = _family_value(rb, x, sp, sm)
        direct = _ordering(va - vb, mp.ldexp(max(va, vb), -prec.equality_exponent))

    if {predicate, direct} == {Ordering.GREATER, Ordering.LESS}:
        raise CertificationError(
            f"comparison predicate says {predicate.value} but direct evaluation "
            f"says {direct.value} for {a.label()} vs {b.label()}"
        )
    return predicate


def _ordering(difference: mpf, tol: mpf) -> Ordering:
    if difference > tol:
        return Ordering.GREATER
    if difference < -tol:
        return Ordering.LESS
    return Ordering.EQUAL


def ordering_of(va: mpf, vb: mpf, prec: PrecisionConfig) -> Ordering:
    """Order of two values, Equal within 2^-(bits - equality_guard_bits) relative."""
    with mp.workprec(prec.mantissa_bits):
        scale = max(abs(va), abs(vb))
        return _ordering(va - vb, mp.ldexp(scale, -prec.equality_exponent))


def ordering_at(a: Curve, b: Curve, x: Real, prec: PrecisionConfig) -> Ordering:
    """Order of any two curves at x, by direct evaluation."""
    va, vb = eval_curves([a, b], x, prec)
    return ordering_of(va, vb, prec)


def named_constants(prec: PrecisionConfig) -> List[NamedConstant]:
    """The constants of the theorems, evaluated at ``prec``."""
    return [
        NamedConstant(
            name=name,
            value=to_decimal(resolve_parameter(name, prec.mantissa_bits), prec),
            closed_form=CLOSED_FORMS[name],
        )
        for name in TABLE_CONSTANTS
    ]
