"""Command-line interface for arcsin-bounds.

Usage:
    arcsin-bounds chain --grid 100000           # check the main inequality chain
    arcsin-bounds certify --b b1                # certify f_b1 >= arcsin
    arcsin-bounds solve                         # b1 from f_b(1) = pi/2
    arcsin-bounds crossover                     # c = 0.387266274...
    arcsin-bounds lambda --order 5 --beta 4     # derivative discrepancy at 0
    arcsin-bounds bench --beta b1               # fast path timing and envelope

Exit codes: 0 verified, 1 verification failed or no solution, 2 usage error.
"""

import functools
import json
from decimal import Decimal
from pathlib import Path
from typing import Any, Callable, List, Optional

import click
from pydantic import BaseModel

from arcsin_bounds_shared.types.bounds import BoundFamily, BoundSpec
from arcsin_bounds_shared.types.precision import (
    CERTIFICATION_BITS,
    VERIFICATION_BITS,
    PrecisionConfig,
)
from arcsin_bounds_shared.types.reports import (
    AlgebraicOptimalityReport,
    BenchReport,
    ChainReport,
    CrossoverResult,
    DiscrepancyReport,
    DominanceSummary,
    EndpointSolution,
    GridKind,
    MatchResidual,
    NonnegCertificate,
    OptimalityReport,
)
from arcsin_bounds_toolkit import __version__
from arcsin_bounds_toolkit.core.bench import run_bench
from arcsin_bounds_toolkit.core.bounds import (
    MAIN_CHAIN,
    THEOREM_CHAINS,
    CertificationError,
    named_constants,
    parse_curve,
    parse_parameter,
)
from arcsin_bounds_toolkit.core.certifier import certify_upper_bound
from arcsin_bounds_toolkit.core.chain import verify_chain
from arcsin_bounds_toolkit.core.crossover import (
    NoCrossoverError,
    find_crossover,
    order_report,
)
from arcsin_bounds_toolkit.core.lambda_solver import (
    MAX_ORDER,
    NoSolutionError,
    algebraic_optimality,
    discrepancy_table,
    endpoint_solution,
    match_at_zero,
    optimality_report,
)
from arcsin_bounds_toolkit.logging import configure_logging
from arcsin_bounds_toolkit.output import OutputFormat, emit, render, render_chain_rows

EXIT_OK = 0
EXIT_FAILED = 1

SCHEMA_MODELS = {
    model.__name__: model
    for model in (
        AlgebraicOptimalityReport,
        BenchReport,
        ChainReport,
        CrossoverResult,
        DiscrepancyReport,
        DominanceSummary,
        EndpointSolution,
        MatchResidual,
        NonnegCertificate,
        OptimalityReport,
    )
}


class ArcsinBoundsGroup(click.Group):
    """Maps library errors onto exit codes: negative outcomes 1, bad input 2."""

    def invoke(self, ctx: click.Context) -> Any:
        try:
            return super().invoke(ctx)
        except (
            NoSolutionError,
            NoCrossoverError,
            CertificationError,
            ArithmeticError,
        ) as e:
            click.echo(f"Error: {e}", err=True)
            ctx.exit(EXIT_FAILED)
        except ValueError as e:
            raise click.UsageError(str(e), ctx) from e


def output_options(
    default_bits: int = VERIFICATION_BITS,
) -> Callable[[Callable[..., Any]], Callable[..., Any]]:
    """--precision-bits, --derivative-step, --format and --output."""

    def decorator(fn: Callable[..., Any]) -> Callable[..., Any]:
        @click.option(
            "--precision-bits",
            type=int,
            default=default_bits,
            show_default=True,
            help="Binary mantissa width of the oracle",
        )
        @click.option(
            "--derivative-step",
            type=float,
            default=1 / 16,
            show_default=True,
            help="Base step of the finite-difference tableau",
        )
        @click.option(
            "--format",
            "fmt",
            type=click.Choice([f.value for f in OutputFormat]),
            default=OutputFormat.TABLE.value,
            show_default=True,
            help="Report format",
        )
        @click.option(
            "--output",
            "-o",
            type=click.Path(dir_okay=False, path_type=Path),
            default=None,
            help="Write the report to a file instead of stdout",
        )
        @functools.wraps(fn)
        def wrapper(
            precision_bits: int,
            derivative_step: float,
            fmt: str,
            output: Optional[Path],
            **kwargs: Any,
        ) -> Any:
            prec = PrecisionConfig(
                mantissa_bits=precision_bits, derivative_step=derivative_step
            )
            return fn(prec=prec, fmt=OutputFormat(fmt), output=output, **kwargs)

        return wrapper

    return decorator


def _spec(family: str, alpha: Optional[str], beta: str) -> BoundSpec:
    return BoundSpec.model_validate(
        {
            "family": BoundFamily(family),
            "alpha": parse_parameter(alpha) if alpha is not None else None,
            "beta": parse_parameter(beta),
        }
    )


def _emit(models: List[BaseModel], fmt: OutputFormat, output: Optional[Path]) -> None:
    emit(render(models, fmt), output)


@click.group(cls=ArcsinBoundsGroup)
@click.version_option(version=__version__, prog_name="arcsin-bounds")
@click.option(
    "--log-level",
    default="WARNING",
    show_default=True,
    help="Log level for diagnostics written to stderr",
)
@click.option("--log-json", is_flag=True, help="Emit logs as JSON lines")
def cli(log_level: str, log_json: bool) -> None:
    """Shafer-Fink type bounds for arcsin: derive, certify and check them."""
    configure_logging(log_level, log_json)


@cli.command()
@click.option("--grid", "grid_size", type=int, default=10_000, show_default=True)
@click.option(
    "--grid-kind",
    type=click.Choice([k.value for k in GridKind]),
    default=GridKind.UNIFORM.value,
    show_default=True,
)
@click.option(
    "--theorem",
    type=click.Choice(list(THEOREM_CHAINS)),
    default=MAIN_CHAIN,
    show_default=True,
    help="Inequality chain to check",
)
@click.option(
    "--workers", type=int, default=1, show_default=True, help="Worker processes"
)
@output_options()
def chain(
    grid_size: int,
    grid_kind: str,
    theorem: str,
    workers: int,
    prec: PrecisionConfig,
    fmt: OutputFormat,
    output: Optional[Path],
) -> None:
    """Check an inequality chain on a grid over [0, 1].

    CSV output has one row per grid point: x, the chain members, then the
    adjacent gaps.
    """
    if grid_size < 2:
        raise click.BadParameter(
            "grid must have at least 2 points", param_hint="--grid"
        )
    report, rows = verify_chain(
        prec,
        theorem=theorem,
        grid_size=grid_size,
        grid_kind=GridKind(grid_kind),
        workers=workers,
        include_rows=fmt is OutputFormat.CSV,
    )
    if fmt is OutputFormat.CSV and rows is not None:
        emit(render_chain_rows(report, rows, fmt), output)
    else:
        _emit([report], fmt, output)
    click.get_current_context().exit(EXIT_OK if report.verdict else EXIT_FAILED)


@cli.command()
@click.option(
    "--b",
    "b",
    default="b1",
    show_default=True,
    help="Parameter of f_b, number or constant name",
)
@output_options(default_bits=CERTIFICATION_BITS)
def certify(
    b: str, prec: PrecisionConfig, fmt: OutputFormat, output: Optional[Path]
) -> None:
    """Certify that f_b is an upper bound of arcsin on [0, 1]."""
    certificate = certify_upper_bound(parse_parameter(b), prec)
    _emit([certificate], fmt, output)
    click.get_current_context().exit(EXIT_OK if certificate.verdict else EXIT_FAILED)


@cli.command()
@click.option("--target", default=None, help="Value of f_b(1); pi/2 when omitted")
@output_options()
def solve(
    target: Optional[str],
    prec: PrecisionConfig,
    fmt: OutputFormat,
    output: Optional[Path],
) -> None:
    """Solve f_b(1) = target for b."""
    value = parse_parameter(target) if target is not None else None
    if value is not None and not isinstance(value, Decimal):
        raise click.BadParameter(
            "target must be a decimal number", param_hint="--target"
        )
    _emit([endpoint_solution(prec, value)], fmt, output)


@cli.command()
@click.option(
    "--a",
    "a",
    default="malesevic_algebraic_upper",
    show_default=True,
    help="First curve",
)
@click.option("--b", "b", default="zhu_upper", show_default=True, help="Second curve")
@click.option(
    "--cells", type=int, default=1024, show_default=True, help="Coarse scan cells"
)
@output_options()
def crossover(
    a: str,
    b: str,
    cells: int,
    prec: PrecisionConfig,
    fmt: OutputFormat,
    output: Optional[Path],
) -> None:
    """Locate where two curves cross on (0, 1).

    Curves are 'arcsin', a named bound, or 'family:alpha=..,beta=..'.
    """
    result = find_crossover(parse_curve(a), parse_curve(b), prec, cells=cells)
    _emit([result], fmt, output)


@cli.command()
@click.option(
    "--a",
    "a",
    default="malesevic_sqrt_upper",
    show_default=True,
    help="First curve",
)
@click.option("--b", "b", default="zhu_upper", show_default=True, help="Second curve")
@click.option("--grid", "grid_size", type=int, default=10_000, show_default=True)
@output_options()
def dominance(
    a: str,
    b: str,
    grid_size: int,
    prec: PrecisionConfig,
    fmt: OutputFormat,
    output: Optional[Path],
) -> None:
    """Sign of a - b on a uniform grid inside (0, 1)."""
    summary = order_report(parse_curve(a), parse_curve(b), grid_size, prec)
    _emit([summary], fmt, output)


@cli.command(name="lambda")
@click.option(
    "--order",
    default="all",
    show_default=True,
    help=f"Derivative order 0..{MAX_ORDER}, or 'all'",
)
@click.option("--beta", default="4", show_default=True, help="Family parameter")
@click.option(
    "--alpha",
    default=None,
    help="Also report the value/slope residuals of Phi_{alpha,beta}",
)
@click.option("--optimality", is_flag=True, help="Report optimality evidence instead")
@click.option(
    "--algebraic", is_flag=True, help="With --optimality, for the algebraic family"
)
@output_options()
def lambda_(
    order: str,
    beta: str,
    alpha: Optional[str],
    optimality: bool,
    algebraic: bool,
    prec: PrecisionConfig,
    fmt: OutputFormat,
    output: Optional[Path],
) -> None:
    """Derivative matching at x = 0 and optimality of the constants."""
    if optimality:
        report: BaseModel = (
            algebraic_optimality(prec) if algebraic else optimality_report(prec)
        )
        _emit([report], fmt, output)
        return

    beta_value = parse_parameter(beta)
    if alpha is not None:
        residual = match_at_zero(parse_parameter(alpha), beta_value, prec)
        _emit([residual], fmt, output)
        return

    if order == "all":
        orders = None
    elif order.isdigit():
        orders = [int(order)]
    else:
        raise click.BadParameter(
            f"expected 0..{MAX_ORDER} or 'all', got {order}", param_hint="--order"
        )
    _emit(list(discrepancy_table(beta_value, prec, orders)), fmt, output)


@cli.command()
@click.option(
    "--family",
    type=click.Choice([f.value for f in BoundFamily]),
    default=BoundFamily.SQRT_MATCHED.value,
    show_default=True,
)
@click.option(
    "--alpha", default=None, help="Numerator parameter (two-parameter families)"
)
@click.option("--beta", default="b1", show_default=True, help="Denominator parameter")
@click.option("--iterations", type=int, default=1000, show_default=True)
@click.option("--grid", "grid_size", type=int, default=1000, show_default=True)
@click.option(
    "--seed", type=int, default=0, show_default=True, help="Seed of the random inputs"
)
@output_options()
def bench(
    family: str,
    alpha: Optional[str],
    beta: str,
    iterations: int,
    grid_size: int,
    seed: int,
    prec: PrecisionConfig,
    fmt: OutputFormat,
    output: Optional[Path],
) -> None:
    """Time the float64 fast path against numpy's arcsin."""
    if iterations < 1:
        raise click.BadParameter("must be at least 1", param_hint="--iterations")
    spec = _spec(family, alpha, beta)
    report = run_bench(spec, prec, iterations, grid_size, seed)
    _emit([report], fmt, output)


@cli.command()
@output_options()
def constants(
    prec: PrecisionConfig, fmt: OutputFormat, output: Optional[Path]
) -> None:
    """Print the constants of the theorems."""
    _emit(list(named_constants(prec)), fmt, output)


@cli.command()
@click.argument("model", type=click.Choice(sorted(SCHEMA_MODELS)), required=False)
def schema(model: Optional[str]) -> None:
    """JSON schema of one report type, or of all of them."""
    if model is not None:
        payload: Any = SCHEMA_MODELS[model].model_json_schema()
    else:
        payload = {
            name: cls.model_json_schema() for name, cls in sorted(SCHEMA_MODELS.items())
        }
    click.echo(json.dumps(payload, indent=2))


if __name__ == "__main__":
    cli()
