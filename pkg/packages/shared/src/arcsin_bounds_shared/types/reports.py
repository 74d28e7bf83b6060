"""Report records produced by derivations, certifications and grid checks.

High-precision reals are carried as ``Decimal`` so JSON output keeps every
digit and parses back to an identical model.
"""

from decimal import Decimal
from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, Field, model_validator

from arcsin_bounds_shared.types.bounds import BoundSpec, Ordering


class GridKind(str, Enum):
    """Grid layouts over [0, 1]."""

    UNIFORM = "uniform"
    CHEBYSHEV = "chebyshev"


class SampleKind(str, Enum):
    """Why a point was evaluated during certification."""

    ENDPOINT = "endpoint"
    CRITICAL = "critical"
    SENTINEL = "sentinel"


class MatchResidual(BaseModel):
    """Residuals of the two value/slope conditions at x = 0."""

    alpha: Decimal = Field(..., description="Numerator parameter")
    beta: Decimal = Field(..., description="Denominator parameter")
    value_residual: Decimal = Field(..., description="|Phi(0) - arcsin(0)|")
    slope_residual: Decimal = Field(..., description="|Phi'(0) - arcsin'(0)|")
    matched: bool = Field(..., description="Both residuals below tolerance")


class DiscrepancyReport(BaseModel):
    """Derivative discrepancy of f_beta - arcsin at x = 0 for one order."""

    order: int = Field(..., ge=0, le=5, description="Derivative order")
    beta: Decimal = Field(..., description="Family parameter")
    analytic: Decimal = Field(..., description="Closed-form discrepancy")
    numeric: Decimal = Field(..., description="Finite-difference discrepancy")
    numeric_error: Decimal = Field(..., description="Extrapolation error estimate")
    abs_diff: Decimal = Field(..., description="|analytic - numeric|")


class EndpointSolution(BaseModel):
    """Parameter b with f_b(1) = target, found two ways."""

    target: Decimal
    b: Decimal = Field(..., description="Root of b -> f_b(1) - target")
    closed_form_b: Decimal = Field(..., description="sqrt(2)(2 - t)/(t - sqrt(2))")
    abs_diff: Decimal
    precision_bits: int


class UpperWitness(BaseModel):
    """A parameter above b1 whose bound drops below arcsin at x."""

    b: Decimal
    x: Decimal
    gap: Decimal = Field(..., description="arcsin(x) - f_b(x), positive")


class LowerCounterexample(BaseModel):
    """A parameter in (b1, 4) whose bound exceeds arcsin near 0."""

    b: Decimal
    g_at_zero: Decimal = Field(..., description="(4-b)/(24(2+b))")
    g_at_one: Decimal = Field(..., description="f_b(1) - pi/2")
    c_b: Decimal = Field(..., description="Sign change of g in (0, 1)")
    xi: Decimal = Field(..., description="Witness point in (0, c_b)")
    g_at_xi: Decimal = Field(..., description="g(xi), positive")


class OptimalityReport(BaseModel):
    """Evidence that f_b1 is the least upper and f_4 the greatest lower bound."""

    b1: Decimal
    endpoint_residual: Decimal = Field(..., description="|f_b1(1) - pi/2|")
    upper_strictness_witness: UpperWitness
    lower_counterexample: LowerCounterexample
    precision_bits: int


class AlgebraicOptimalityReport(BaseModel):
    """Evidence for the two optimal constants of the algebraic family."""

    lower_b: Decimal = Field(..., description="b = 2")
    upper_b: Decimal = Field(..., description="b = 2/(pi - 2)")
    upper_endpoint_residual: Decimal = Field(..., description="|f_b(1) - pi/2|")
    lower_cubic_discrepancy: Decimal = Field(
        ..., description="Cubic Taylor coefficient of f_2 - arcsin, zero"
    )
    upper_witness: UpperWitness
    lower_witness: UpperWitness = Field(
        ..., description="b below 2 exceeding arcsin near 0; gap = f_b - arcsin"
    )
    precision_bits: int


class CriticalPoint(BaseModel):
    """A root of the numerator of w'(u)."""

    u: Decimal
    multiplicity: int = Field(..., ge=1, le=2)
    in_interval: bool = Field(..., description="u lies in [0, sqrt(2) - 1]")
    w_prime_residual: Decimal = Field(..., description="|w'(u)| after polishing")
    polished: bool = Field(..., description="Refined by bracketing")


class SampledValue(BaseModel):
    """A value of w(u) evaluated while building a certificate."""

    u: Decimal
    value: Decimal
    kind: SampleKind


class NonnegCertificate(BaseModel):
    """Numeric certificate that w(u) >= 0 on [0, sqrt(2) - 1]."""

    b: Decimal
    interval: Tuple[Decimal, Decimal]
    critical_points: List[Decimal]
    endpoint_values: Tuple[Decimal, Decimal]
    extremum_values: List[Decimal]
    min_value: Decimal
    argmin_u: Decimal
    verdict: bool
    violations: List[SampledValue] = Field(default_factory=list)
    sample_count: int
    precision_used: int

    @model_validator(mode="after")
    def _verdict_matches_violations(self) -> "NonnegCertificate":
        if self.verdict == bool(self.violations):
            raise ValueError(
                "verdict must be true exactly when there are no violations"
            )
        return self


class CrossoverResult(BaseModel):
    """Abscissa where two curves coincide."""

    a: str = Field(..., description="Label of the first curve")
    b: str = Field(..., description="Label of the second curve")
    c: Decimal
    bracket: Tuple[Decimal, Decimal]
    residual: Decimal = Field(..., description="|a(c) - b(c)|")
    left_order: Ordering = Field(..., description="Order of a vs b on (lo, c)")
    right_order: Ordering = Field(..., description="Order of a vs b on (c, hi)")
    additional_brackets: List[Tuple[Decimal, Decimal]] = Field(
        default_factory=list, description="Further sign-change cells, if any"
    )
    precision_bits: int

    @model_validator(mode="after")
    def _c_inside_bracket(self) -> "CrossoverResult":
        lo, hi = self.bracket
        if not lo < self.c < hi:
            raise ValueError("crossover must lie strictly inside its bracket")
        return self


class DominanceSummary(BaseModel):
    """Sign of a - b on a uniform grid over (0, 1)."""

    a: str
    b: str
    grid_size: int
    counts: Dict[Ordering, int]
    uniform_order: Optional[Ordering] = Field(
        None, description="Set when one ordering holds on the whole grid"
    )
    sign_change_cells: List[Tuple[Decimal, Decimal]] = Field(default_factory=list)


class ChainRow(BaseModel):
    """Chain member values and adjacent gaps at one grid point."""

    x: Decimal
    values: List[Decimal]
    gaps: List[Decimal]


class PairGap(BaseModel):
    pair: str
    min_gap: Decimal
    argmin_x: Decimal


class ChainViolation(BaseModel):
    x: Decimal
    pair: str
    gap: Decimal


class ChainReport(BaseModel):
    """Grid-level check of an inequality chain."""

    theorem: str
    members: List[str]
    grid_size: int
    grid_kind: GridKind
    precision_bits: int
    per_pair_min_gap: List[PairGap]
    violations: List[ChainViolation] = Field(default_factory=list)
    verdict: bool

    @model_validator(mode="after")
    def _verdict_matches_violations(self) -> "ChainReport":
        if self.verdict == bool(self.violations):
            raise ValueError(
                "verdict must be true exactly when there are no violations"
            )
        return self


class BenchReport(BaseModel):
    """Timing of the machine-precision fast path and its error envelope."""

    spec: BoundSpec
    iterations: int = Field(..., ge=1)
    grid_size: int = Field(..., ge=2)
    seed: int
    ns_per_eval_bound: float
    ns_per_eval_reference: float
    max_abs_error_on_grid: Decimal = Field(..., description="max |bound - arcsin|")
    argmax_x: Decimal
    fast_path_max_deviation: float = Field(
        ..., description="max |fast path - oracle bound| on the grid"
    )
    precision_bits: int
