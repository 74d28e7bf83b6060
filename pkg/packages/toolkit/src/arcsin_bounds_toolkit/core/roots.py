"""Bracketing root finders in extended precision."""

from typing import Callable, List, Optional, Sequence, Tuple

import structlog
from mpmath import mp, mpf

logger = structlog.get_logger(__name__)

MAX_BISECTION_STEPS = 8192


class BracketError(ValueError):
    """Raised when a bracket does not enclose a sign change."""

    pass


def sign(value: mpf) -> int:
    return (value > 0) - (value < 0)


def bisect(
    f: Callable[[mpf], mpf],
    lo: mpf,
    hi: mpf,
    rel_exponent: int,
    f_lo: Optional[mpf] = None,
    f_hi: Optional[mpf] = None,
) -> Tuple[mpf, mpf]:
    """Shrink [lo, hi] around a sign change of f.

    Stops once ``hi - lo <= 2^-rel_exponent * max(|lo|, |hi|)`` or the
    midpoint can no longer be represented. An exact zero collapses the
    bracket to that point.

    Returns:
        The final bracket (lo, hi).

    Raises:
        BracketError: If f has the same sign at both ends.
    """
    f_lo = f(lo) if f_lo is None else f_lo
    f_hi = f(hi) if f_hi is None else f_hi
    if f_lo == 0:
        return lo, lo
    if f_hi == 0:
        return hi, hi
    if sign(f_lo) == sign(f_hi):
        raise BracketError(
            f"no sign change on [{mp.nstr(lo, 12)}, {mp.nstr(hi, 12)}]"
        )

    steps = 0
    while steps < MAX_BISECTION_STEPS:
        if hi - lo <= mp.ldexp(max(abs(lo), abs(hi)), -rel_exponent):
            break
        mid = (lo + hi) / 2
        if mid <= lo or mid >= hi:
            break
        f_mid = f(mid)
        steps += 1
        if f_mid == 0:
            return mid, mid
        if sign(f_mid) == sign(f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    logger.debug("bisection finished", steps=steps, width=mp.nstr(hi - lo, 5))
    return lo, hi


def secant_polish(f: Callable[[mpf], mpf], lo: mpf, hi: mpf) -> mpf:
    """Secant iteration started from a bracket; falls back to its midpoint.

    The result is only accepted when it stays inside [lo, hi].
    """
    midpoint = (lo + hi) / 2
    if lo == hi:
        return lo
    try:
        root = mp.findroot(f, (lo, hi), solver="secant", verify=False)
    except (ZeroDivisionError, ValueError):
        logger.debug("secant polish failed, keeping bisection midpoint")
        return midpoint
    if lo <= root <= hi:
        return root
    return midpoint


def sign_change_cells(values: Sequence[mpf]) -> List[Tuple[int, int]]:
    """Index pairs (i, j), i < j, across which the sign of ``values`` flips.

    A zero at an interior point i that the values cross yields the pair
    (i - 1, i + 1).
    """
    cells: List[Tuple[int, int]] = []
    i = 0
    while i < len(values) - 1:
        s_here, s_next = sign(values[i]), sign(values[i + 1])
        if s_here != 0 and s_next != 0 and s_here != s_next:
            cells.append((i, i + 1))
        elif s_next == 0 and i + 2 < len(values) and s_here != 0:
            if sign(values[i + 2]) == -s_here:
                cells.append((i, i + 2))
            i += 1
        i += 1
    return cells


def scan_sign_changes(
    f: Callable[[mpf], mpf], points: Sequence[mpf]
) -> Tuple[List[Tuple[int, int]], List[mpf]]:
    """Evaluate f on sorted points and list the cells where its sign flips.

    Returns:
        (cells, values), cells as in ``sign_change_cells``.
    """
    values = [f(p) for p in points]
    return sign_change_cells(values), values
