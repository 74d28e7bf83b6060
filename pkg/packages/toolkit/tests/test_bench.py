from decimal import Decimal

import pytest

from arcsin_bounds_shared.types.bounds import BoundSpec, ConstantName
from arcsin_bounds_toolkit.core.bench import run_bench
from arcsin_bounds_toolkit.core.bounds import NAMED_BOUNDS, ParameterError

B1 = BoundSpec.matched(ConstantName.B1)


def test_bench_report(prec):
    report = run_bench(B1, prec, iterations=3, grid_size=200, seed=1)
    assert report.ns_per_eval_bound > 0
    assert report.ns_per_eval_reference > 0
    assert 0 < report.max_abs_error_on_grid < Decimal("0.01")
    assert 0 <= report.argmax_x <= 1
    assert report.fast_path_max_deviation < 1e-13
    assert report.spec == B1


def test_bench_envelope_is_deterministic(prec):
    first = run_bench(B1, prec, iterations=1, grid_size=50, seed=3)
    second = run_bench(B1, prec, iterations=1, grid_size=50, seed=3)
    assert first.max_abs_error_on_grid == second.max_abs_error_on_grid
    assert first.argmax_x == second.argmax_x


def test_bench_algebraic_family(prec):
    report = run_bench(NAMED_BOUNDS["fink_upper"], prec, iterations=1, grid_size=100)
    assert report.max_abs_error_on_grid > 0


@pytest.mark.parametrize("iterations, grid_size", [(0, 100), (1, 1)])
def test_bench_rejects_sizes(prec, iterations, grid_size):
    with pytest.raises(ParameterError):
        run_bench(B1, prec, iterations=iterations, grid_size=grid_size)
