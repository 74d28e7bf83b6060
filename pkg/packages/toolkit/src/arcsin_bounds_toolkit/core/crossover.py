"""Crossings of two curves on (0, 1) and grid dominance summaries."""

from decimal import Decimal
from typing import Callable, List, Optional, Tuple

import structlog
from mpmath import mp, mpf

from arcsin_bounds_shared.types.bounds import Curve, Ordering
from arcsin_bounds_shared.types.precision import PrecisionConfig
from arcsin_bounds_shared.types.reports import CrossoverResult, DominanceSummary
from arcsin_bounds_toolkit.core.bounds import (
    ParameterError,
    curve_label,
    eval_curves,
    ordering_at,
    ordering_of,
)
from arcsin_bounds_toolkit.core.oracle import Real, to_decimal, to_mpf
from arcsin_bounds_toolkit.core.roots import (
    bisect,
    scan_sign_changes,
    sign_change_cells,
)

logger = structlog.get_logger(__name__)

COARSE_CELLS = 1024
# both curves vanish at 0, so the scan starts just inside the interval
SCAN_START = Decimal("1e-6")
MIN_GRID_SIZE = 3


class NoCrossoverError(ValueError):
    """Raised when the coarse scan finds no sign change of a - b."""

    pass


def _difference(
    a: Curve, b: Curve, prec: PrecisionConfig, snap: bool = True
) -> Callable[[mpf], mpf]:
    # with snap, values Equal under the comparison tolerance give exactly 0
    def diff(x: mpf) -> mpf:
        va, vb = eval_curves([a, b], x, prec)
        if snap and ordering_of(va, vb, prec) is Ordering.EQUAL:
            return mpf(0)
        return va - vb

    return diff


def find_crossover(
    a: Curve,
    b: Curve,
    prec: PrecisionConfig,
    interval: Optional[Tuple[Real, Real]] = None,
    cells: int = COARSE_CELLS,
) -> CrossoverResult:
    """First abscissa in ``interval`` where a and b coincide.

    The interval (default [1e-6, 1]) is scanned in ``cells`` uniform cells;
    the first cell with a sign change of a - b is bisected to
    2^-(bits - solver_guard_bits) relative. Further sign-change cells are
    logged as a warning and returned in ``additional_brackets``. The side
    orderings are sampled at the midpoints of (start, c) and (c, end).

    Raises:
        NoCrossoverError: If a - b has no sign change on the scan grid.
        ParameterError: If the interval is not inside [0, 1] or cells < 1.
    """
    if cells < 1:
        raise ParameterError(f"cells must be positive, got {cells}")
    bits = prec.mantissa_bits
    label_a, label_b = curve_label(a), curve_label(b)
    with mp.workprec(bits):
        if interval is None:
            start, end = to_mpf(SCAN_START), mpf(1)
        else:
            start, end = to_mpf(interval[0]), to_mpf(interval[1])
        if not 0 <= start < end <= 1:
            raise ParameterError(
                f"crossover interval must satisfy 0 <= lo < hi <= 1, got "
                f"[{mp.nstr(start, 10)}, {mp.nstr(end, 10)}]"
            )
        diff = _difference(a, b, prec)
        points = [start + (end - start) * k / cells for k in range(cells + 1)]
        brackets, values = scan_sign_changes(diff, points)
        if not brackets:
            raise NoCrossoverError(
                f"{label_a} - {label_b} does not change sign on "
                f"[{mp.nstr(start, 10)}, {mp.nstr(end, 10)}]"
            )
        if len(brackets) > 1:
            logger.warning(
                "multiple crossovers detected, returning the first",
                a=label_a,
                b=label_b,
                count=len(brackets),
            )

        i, j = brackets[0]
        lo, hi = bisect(
            diff, points[i], points[j], prec.solver_exponent, values[i], values[j]
        )
        c = (lo + hi) / 2
        residual = abs(_difference(a, b, prec, snap=False)(c))
        left_order = ordering_at(a, b, (start + c) / 2, prec)
        right_order = ordering_at(a, b, (c + end) / 2, prec)

    logger.info("crossover located", a=label_a, b=label_b, c=mp.nstr(c, 15))
    return CrossoverResult(
        a=label_a,
        b=label_b,
        c=to_decimal(c, prec),
        bracket=(to_decimal(points[i], prec), to_decimal(points[j], prec)),
        residual=to_decimal(residual, prec),
        left_order=left_order,
        right_order=right_order,
        additional_brackets=[
            (to_decimal(points[p], prec), to_decimal(points[q], prec))
            for p, q in brackets[1:]
        ],
        precision_bits=bits,
    )


def order_report(
    a: Curve, b: Curve, grid_size: int, prec: PrecisionConfig
) -> DominanceSummary:
    """Sign of a - b on the grid k/(n + 1), k = 1..n, inside (0, 1).

    Raises:
        ParameterError: If grid_size < 3.
    """
    if grid_size < MIN_GRID_SIZE:
        raise ParameterError(
            f"grid_size must be at least {MIN_GRID_SIZE}, got {grid_size}"
        )
    bits = prec.mantissa_bits
    with mp.workprec(bits):
        points = [mpf(k) / (grid_size + 1) for k in range(1, grid_size + 1)]
        orders: List[Ordering] = []
        diffs: List[mpf] = []
        for x in points:
            va, vb = eval_curves([a, b], x, prec)
            order = ordering_of(va, vb, prec)
            orders.append(order)
            diffs.append(mpf(0) if order is Ordering.EQUAL else va - vb)
        cells = sign_change_cells(diffs)

    counts = {order: orders.count(order) for order in Ordering}
    uniform = orders[0] if counts[orders[0]] == grid_size else None
    logger.info(
        "dominance summary",
        a=curve_label(a),
        b=curve_label(b),
        uniform_order=uniform.value if uniform else None,
        sign_changes=len(cells),
    )
    return DominanceSummary(
        a=curve_label(a),
        b=curve_label(b),
        grid_size=grid_size,
        counts=counts,
        uniform_order=uniform,
        sign_change_cells=[
            (to_decimal(points[i], prec), to_decimal(points[j], prec)) for i, j in cells
        ],
    )
