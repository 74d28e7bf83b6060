"""Grid checks of the inequality chains."""

from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Sequence, Tuple

import structlog
from mpmath import mp, mpf

from arcsin_bounds_shared.types.precision import PrecisionConfig
from arcsin_bounds_shared.types.reports import (
    ChainReport,
    ChainRow,
    ChainViolation,
    GridKind,
    PairGap,
)
from arcsin_bounds_toolkit.core.bounds import (
    MAIN_CHAIN,
    THEOREM_CHAINS,
    ParameterError,
    chain_curves,
    eval_chain,
)
from arcsin_bounds_toolkit.core.oracle import to_decimal

logger = structlog.get_logger(__name__)

MIN_CHUNK = 256


def make_grid(n: int, kind: GridKind, prec: PrecisionConfig) -> List[mpf]:
    """n points on [0, 1], both ends included.

    Uniform points are k/(n-1); Chebyshev points (1 - cos(k pi/(n-1)))/2
    cluster at both ends.
    """
    if n < 2:
        raise ParameterError(f"grid needs at least 2 points, got {n}")
    with mp.workprec(prec.mantissa_bits):
        if kind is GridKind.UNIFORM:
            return [mpf(k) / (n - 1) for k in range(n)]
        points = [(1 - mp.cos(k * mp.pi / (n - 1))) / 2 for k in range(n)]
        # pin the ends; cos(pi) may round away from -1
        points[0], points[-1] = mpf(0), mpf(1)
        return [min(max(p, mpf(0)), mpf(1)) for p in points]


def _evaluate_chunk(args: Tuple[str, List[mpf], PrecisionConfig]) -> List[List[mpf]]:
    theorem, points, prec = args
    return [eval_chain(x, prec, theorem) for x in points]


def evaluate_grid(
    theorem: str, points: Sequence[mpf], prec: PrecisionConfig, workers: int = 1
) -> List[List[mpf]]:
    """Chain values at every point, in point order.

    With ``workers > 1`` the grid is split into contiguous chunks evaluated
    in a process pool, since mpmath precision is process-global.
    """
    chain_curves(theorem)
    if workers <= 1 or len(points) < 2 * MIN_CHUNK:
        return _evaluate_chunk((theorem, list(points), prec))

    size = max(MIN_CHUNK, -(-len(points) // (workers * 4)))
    chunks = [list(points[i : i + size]) for i in range(0, len(points), size)]
    logger.debug(
        "evaluating chain grid in process pool",
        workers=workers,
        chunks=len(chunks),
    )
    rows: List[List[mpf]] = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        jobs = [(theorem, chunk, prec) for chunk in chunks]
        for part in pool.map(_evaluate_chunk, jobs):
            rows.extend(part)
    return rows


def _gaps(values: List[mpf], prec: PrecisionConfig) -> List[mpf]:
    gaps = []
    for lower, upper in zip(values, values[1:]):
        gap = upper - lower
        tol = mp.ldexp(max(abs(lower), abs(upper)), -prec.equality_exponent)
        gaps.append(mpf(0) if abs(gap) <= tol else gap)
    return gaps


def verify_chain(
    prec: PrecisionConfig,
    theorem: str = MAIN_CHAIN,
    grid_size: int = 10_000,
    grid_kind: GridKind = GridKind.UNIFORM,
    workers: int = 1,
    include_rows: bool = False,
) -> Tuple[ChainReport, Optional[List[ChainRow]]]:
    """Check that every adjacent pair of the chain is ordered on a grid.

    Gaps within the equality tolerance count as 0 (the curves touch at
    x = 0 and some at x = 1). A gap below that is a violation.

    Returns:
        The report and, when ``include_rows`` is set, one row per grid point.
    """
    chain_curves(theorem)
    labels = list(THEOREM_CHAINS[theorem])
    points = make_grid(grid_size, grid_kind, prec)
    rows = evaluate_grid(theorem, points, prec, workers)
    pairs = [f"{lo}<={hi}" for lo, hi in zip(labels, labels[1:])]

    best: List[Tuple[mpf, mpf]] = [(mp.inf, mpf(0))] * len(pairs)
    violations: List[ChainViolation] = []
    table: List[ChainRow] = []
    with mp.workprec(prec.mantissa_bits):
        for x, values in zip(points, rows):
            gaps = _gaps(values, prec)
            for k, gap in enumerate(gaps):
                if gap < best[k][0]:
                    best[k] = (gap, x)
                if gap < 0:
                    violations.append(
                        ChainViolation(
                            x=to_decimal(x, prec),
                            pair=pairs[k],
                            gap=to_decimal(gap, prec),
                        )
                    )
            if include_rows:
                table.append(
                    ChainRow(
                        x=to_decimal(x, prec),
                        values=[to_decimal(v, prec) for v in values],
                        gaps=[to_decimal(g, prec) for g in gaps],
                    )
                )

    report = ChainReport(
        theorem=theorem,
        members=labels,
        grid_size=grid_size,
        grid_kind=grid_kind,
        precision_bits=prec.mantissa_bits,
        per_pair_min_gap=[
            PairGap(
                pair=pair,
                min_gap=to_decimal(gap, prec),
                argmin_x=to_decimal(x, prec),
            )
            for pair, (gap, x) in zip(pairs, best)
        ],
        violations=violations,
        verdict=not violations,
    )
    logger.info(
        "chain verified",
        theorem=theorem,
        grid_size=grid_size,
        verdict=report.verdict,
        violations=len(violations),
    )
    return report, (table if include_rows else None)
