import pytest
from mpmath import mp, mpf

from arcsin_bounds_toolkit.core.roots import (
    BracketError,
    bisect,
    scan_sign_changes,
    secant_polish,
    sign,
    sign_change_cells,
)


@pytest.fixture(autouse=True)
def working_precision():
    with mp.workprec(128):
        yield


def test_bisect_brackets_sqrt2():
    lo, hi = bisect(lambda x: x**2 - 2, mpf(1), mpf(2), 100)
    assert lo < mp.sqrt(2) < hi or lo == hi
    assert hi - lo <= mp.ldexp(mpf(2), -100)


def test_bisect_accepts_known_end_values():
    calls = []

    def f(x):
        calls.append(x)
        return x - mpf("0.3")

    bisect(f, mpf(0), mpf(1), 20, f_lo=mpf("-0.3"), f_hi=mpf("0.7"))
    assert mpf(0) not in calls and mpf(1) not in calls


def test_bisect_collapses_on_exact_zero():
    assert bisect(lambda x: x - 1, mpf(0), mpf(2), 100) == (1, 1)


def test_bisect_endpoint_root():
    assert bisect(lambda x: x, mpf(0), mpf(1), 100) == (0, 0)


def test_bisect_without_sign_change():
    with pytest.raises(BracketError, match="no sign change"):
        bisect(lambda x: x**2 + 1, mpf(-1), mpf(1), 50)


def test_secant_polish_refines_inside_bracket():
    lo, hi = bisect(lambda x: mp.cos(x), mpf(1), mpf(2), 30)
    root = secant_polish(lambda x: mp.cos(x), lo, hi)
    assert lo <= root <= hi
    assert abs(root - mp.pi / 2) < mpf("1e-30")


def test_secant_polish_degenerate_bracket():
    assert secant_polish(lambda x: x, mpf("0.5"), mpf("0.5")) == mpf("0.5")


@pytest.mark.parametrize(
    "value, expected",
    [(mpf("1e-300"), 1), (mpf(0), 0), (mpf("-2"), -1)],
)
def test_sign(value, expected):
    assert sign(value) == expected


@pytest.mark.parametrize(
    "values, cells",
    [
        ([1, -1, -2, 0, 3], [(0, 1), (2, 4)]),
        ([1, 0, 1], []),
        ([1, 2, 3], []),
        ([-1, 1, -1, 1], [(0, 1), (1, 2), (2, 3)]),
        ([0, 1, -1, 0], [(1, 2)]),
    ],
)
def test_sign_change_cells(values, cells):
    assert sign_change_cells([mpf(v) for v in values]) == cells


def test_scan_sign_changes_returns_values():
    points = [mpf(k) / 4 for k in range(5)]
    cells, values = scan_sign_changes(lambda x: x - mpf("0.6"), points)
    assert cells == [(2, 3)]
    assert values[2] < 0 < values[3]
