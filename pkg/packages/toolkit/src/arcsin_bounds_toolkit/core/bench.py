"""Timing of the machine-precision fast path against numpy's arcsin."""

import time
from typing import Callable

import numpy as np
import structlog
from mpmath import mp
from numpy.typing import NDArray

from arcsin_bounds_shared.types.bounds import BoundSpec
from arcsin_bounds_shared.types.precision import PrecisionConfig
from arcsin_bounds_shared.types.reports import BenchReport, GridKind
from arcsin_bounds_toolkit.core.bounds import ParameterError, eval_bound, fast_evaluator
from arcsin_bounds_toolkit.core.chain import make_grid
from arcsin_bounds_toolkit.core.oracle import arcsin_ref, to_decimal

logger = structlog.get_logger(__name__)


def _ns_per_eval(
    fn: Callable[[NDArray[np.float64]], NDArray[np.float64]],
    xs: NDArray[np.float64],
    iterations: int,
) -> float:
    fn(xs)
    start = time.perf_counter_ns()
    for _ in range(iterations):
        fn(xs)
    elapsed = time.perf_counter_ns() - start
    return elapsed / (iterations * xs.size)


def run_bench(
    spec: BoundSpec,
    prec: PrecisionConfig,
    iterations: int = 100,
    grid_size: int = 1000,
    seed: int = 0,
) -> BenchReport:
    """Time the fast path on random inputs and measure its error envelope.

    Inputs are ``grid_size`` uniform random points from ``default_rng(seed)``.
    The envelope max |bound - arcsin| is computed with the oracle on a
    uniform grid of the same size, where the fast path's distance from the
    oracle bound is also recorded.
    """
    if iterations < 1 or grid_size < 2:
        raise ParameterError("bench needs iterations >= 1 and grid_size >= 2")
    fast = fast_evaluator(spec)
    rng = np.random.default_rng(seed)
    xs = rng.uniform(0.0, 1.0, size=grid_size)

    ns_bound = _ns_per_eval(fast, xs, iterations)
    ns_reference = _ns_per_eval(np.arcsin, xs, iterations)

    grid = make_grid(grid_size, GridKind.UNIFORM, prec)
    fast_values = fast(np.array([float(x) for x in grid]))
    with mp.workprec(prec.mantissa_bits):
        best_error, best_x = mp.mpf(-1), mp.mpf(0)
        deviation = 0.0
        for x, fast_value in zip(grid, fast_values):
            bound = eval_bound(spec, x, prec)
            error = abs(bound - arcsin_ref(x, prec))
            if error > best_error:
                best_error, best_x = error, x
            deviation = max(deviation, abs(float(fast_value) - float(bound)))

    logger.info(
        "bench finished",
        spec=spec.label(),
        ns_per_eval_bound=round(ns_bound, 3),
        ns_per_eval_reference=round(ns_reference, 3),
    )
    return BenchReport(
        spec=spec,
        iterations=iterations,
        grid_size=grid_size,
        seed=seed,
        ns_per_eval_bound=ns_bound,
        ns_per_eval_reference=ns_reference,
        max_abs_error_on_grid=to_decimal(best_error, prec),
        argmax_x=to_decimal(best_x, prec),
        fast_path_max_deviation=deviation,
        precision_bits=prec.mantissa_bits,
    )
