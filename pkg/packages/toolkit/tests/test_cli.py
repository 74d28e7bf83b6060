import csv
import io
import json
from decimal import Decimal

import pytest
from click.testing import CliRunner

from arcsin_bounds_shared.types.reports import (
    BenchReport,
    ChainReport,
    ChainViolation,
    GridKind,
    PairGap,
)
from arcsin_bounds_toolkit.main import cli


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


def _json(result):
    assert result.exit_code == 0, result.output
    return json.loads(result.stdout)


def test_version(runner):
    result = runner.invoke(cli, ["--version"])
    assert result.exit_code == 0
    assert "0.1.0" in result.stdout


def test_solve_prints_b1(runner):
    result = runner.invoke(cli, ["solve"])
    assert result.exit_code == 0
    assert "3.87645254513" in result.stdout


def test_solve_json_is_deterministic(runner):
    first = runner.invoke(cli, ["solve", "--format", "json"])
    second = runner.invoke(cli, ["solve", "--format", "json"])
    assert first.stdout == second.stdout
    payload = _json(first)
    assert abs(Decimal(payload["b"]) - Decimal("3.876452545133979")) < Decimal("1e-14")


def test_solve_without_solution(runner):
    result = runner.invoke(cli, ["solve", "--target", "1.4142"])
    assert result.exit_code == 1


def test_solve_rejects_constant_target(runner):
    result = runner.invoke(cli, ["solve", "--target", "pi"])
    assert result.exit_code == 2


def test_crossover(runner):
    result = runner.invoke(cli, ["crossover"])
    assert result.exit_code == 0
    assert "0.387266274" in result.stdout


def test_crossover_of_identical_curves(runner):
    result = runner.invoke(
        cli, ["crossover", "--a", "zhu_upper", "--b", "zhu_upper", "--cells", "8"]
    )
    assert result.exit_code == 1


def test_crossover_unknown_curve(runner):
    result = runner.invoke(cli, ["crossover", "--a", "nope"])
    assert result.exit_code == 2


def test_lambda_fifth_order_at_four(runner):
    args = ["lambda", "--order", "5", "--beta", "4", "--format", "json"]
    payload = _json(runner.invoke(cli, args))
    assert payload["order"] == 5
    assert abs(float(payload["analytic"]) + 0.0416667) < 1e-7


def test_lambda_all_orders_csv(runner):
    result = runner.invoke(cli, ["lambda", "--beta", "b1", "--format", "csv"])
    assert result.exit_code == 0
    rows = list(csv.DictReader(io.StringIO(result.stdout)))
    assert [row["order"] for row in rows] == ["0", "1", "2", "3", "4", "5"]


def test_lambda_match_residuals(runner):
    args = ["lambda", "--alpha", "6", "--beta", "4", "--format", "json"]
    payload = _json(runner.invoke(cli, args))
    assert payload["matched"] is True


@pytest.mark.parametrize("order", ["6", "abc"])
def test_lambda_rejects_order(runner, order):
    assert runner.invoke(cli, ["lambda", "--order", order]).exit_code == 2


def test_lambda_optimality(runner):
    payload = _json(runner.invoke(cli, ["lambda", "--optimality", "--format", "json"]))
    assert Decimal(payload["upper_strictness_witness"]["gap"]) > 0
    assert Decimal(payload["lower_counterexample"]["g_at_xi"]) > 0


@pytest.mark.parametrize(
    "b, code", [("b1", 0), ("3.876452527", 0), ("4.5", 1), ("-1", 2)]
)
def test_certify_exit_codes(runner, b, code):
    result = runner.invoke(cli, ["certify", f"--b={b}"])
    assert result.exit_code == code, result.output


def test_certify_defaults_to_256_bits(runner):
    payload = _json(runner.invoke(cli, ["certify", "--format", "json"]))
    assert payload["precision_used"] == 256
    assert payload["verdict"] is True


def test_chain_grid_too_small(runner):
    assert runner.invoke(cli, ["chain", "--grid", "1"]).exit_code == 2


def test_chain_passes(runner):
    result = runner.invoke(cli, ["chain", "--grid", "101", "--format", "json"])
    assert _json(result)["verdict"] is True


def test_chain_csv_has_one_row_per_point(runner):
    args = ["chain", "--grid", "5", "--theorem", "fink", "--format", "csv"]
    result = runner.invoke(cli, args)
    assert result.exit_code == 0
    lines = result.stdout.splitlines()
    assert lines[0].startswith("x,shafer_algebraic_lower,arcsin,fink_upper,gap[")
    assert len(lines) == 6


def test_chain_violation_exits_one(runner, mocker):
    report = ChainReport(
        theorem="main",
        members=["a", "b"],
        grid_size=2,
        grid_kind=GridKind.UNIFORM,
        precision_bits=128,
        per_pair_min_gap=[
            PairGap(pair="a<=b", min_gap=Decimal(-1), argmin_x=Decimal("0.5"))
        ],
        violations=[ChainViolation(x=Decimal("0.5"), pair="a<=b", gap=Decimal(-1))],
        verdict=False,
    )
    mocked = mocker.patch(
        "arcsin_bounds_toolkit.main.verify_chain", return_value=(report, None)
    )
    result = runner.invoke(cli, ["chain", "--grid", "2"])
    assert result.exit_code == 1
    assert mocked.call_args.kwargs["grid_size"] == 2


def test_dominance(runner):
    args = ["dominance", "--a", "sqrt_matched:beta=b1", "--grid", "50"]
    payload = _json(runner.invoke(cli, [*args, "--format", "json"]))
    assert payload["uniform_order"] == "less"


def test_bench_rejects_zero_iterations(runner):
    assert runner.invoke(cli, ["bench", "--iterations", "0"]).exit_code == 2


def test_bench_report(runner):
    args = ["bench", "--iterations", "2", "--grid", "50", "--format", "json"]
    result = runner.invoke(cli, args)
    report = BenchReport.model_validate(_json(result))
    assert report.spec.label() == "sqrt_matched:beta=b1"
    assert report.grid_size == 50


def test_constants_csv(runner):
    result = runner.invoke(cli, ["constants", "--format", "csv"])
    assert result.exit_code == 0
    rows = list(csv.DictReader(io.StringIO(result.stdout)))
    assert len(rows) == 6
    assert {row["name"] for row in rows} >= {"b1", "crossover_c"}


def test_schema(runner):
    payload = _json(runner.invoke(cli, ["schema", "NonnegCertificate"]))
    assert "verdict" in payload["properties"]
    assert "ChainReport" in _json(runner.invoke(cli, ["schema"]))


def test_output_file(runner, tmp_path):
    target = tmp_path / "b1.json"
    result = runner.invoke(cli, ["solve", "--format", "json", "--output", str(target)])
    assert result.exit_code == 0
    assert result.stdout == ""
    assert json.loads(target.read_text(encoding="utf-8"))["precision_bits"] == 128


def test_logs_stay_off_stdout(runner):
    args = ["--log-level", "INFO", "--log-json", "solve", "--format", "json"]
    result = runner.invoke(cli, args)
    payload = _json(result)
    assert payload["precision_bits"] == 128
    assert "solved endpoint condition" in result.stderr


def test_bad_log_level(runner):
    assert runner.invoke(cli, ["--log-level", "LOUD", "solve"]).exit_code == 2


def test_precision_bits_bounds(runner):
    assert runner.invoke(cli, ["solve", "--precision-bits", "32"]).exit_code == 2
