"""Precision and tolerance policy for the extended-precision oracle."""

from pydantic import BaseModel, ConfigDict, Field

VERIFICATION_BITS = 128
CERTIFICATION_BITS = 256


class TolerancePolicy(BaseModel):
    """How relative tolerances are derived from the mantissa width.

    Every tolerance is ``2^-(mantissa_bits - guard_bits)`` for one of the
    guard-bit counts below.
    """

    model_config = ConfigDict(frozen=True)

    equality_guard_bits: int = Field(
        8, ge=0, description="Guard bits for Equal in pointwise comparison"
    )
    solver_guard_bits: int = Field(
        16, ge=0, description="Guard bits for root finding and agreement checks"
    )
    residual_guard_bits: int = Field(
        32, ge=0, description="Guard bits for critical-point residuals"
    )
    derivative_extra_bits: int = Field(
        96, ge=0, description="Working bits added inside numeric differentiation"
    )


class PrecisionConfig(BaseModel):
    """Mantissa width and tolerance policy for one computation."""

    model_config = ConfigDict(frozen=True)

    mantissa_bits: int = Field(
        VERIFICATION_BITS, ge=64, le=4096, description="Binary mantissa width"
    )
    derivative_step: float = Field(
        1 / 16, gt=0, le=0.125, description="Base step of the difference tableau"
    )
    tolerance_policy: TolerancePolicy = Field(
        default_factory=TolerancePolicy, description="Tolerance derivation rule"
    )

    @classmethod
    def certification(cls) -> "PrecisionConfig":
        return cls(mantissa_bits=CERTIFICATION_BITS)

    @property
    def decimal_digits(self) -> int:
        """Decimal digits carried by the mantissa (for printing)."""
        return int(self.mantissa_bits * 0.30103) + 1

    def tol_exponent(self, guard_bits: int) -> int:
        """Exponent k of the relative tolerance 2^-k, k = mantissa_bits - guard_bits."""
        return max(self.mantissa_bits - guard_bits, 1)

    @property
    def equality_exponent(self) -> int:
        return self.tol_exponent(self.tolerance_policy.equality_guard_bits)

    @property
    def solver_exponent(self) -> int:
        return self.tol_exponent(self.tolerance_policy.solver_guard_bits)

    @property
    def residual_exponent(self) -> int:
        return self.tol_exponent(self.tolerance_policy.residual_guard_bits)

    def with_bits(self, mantissa_bits: int) -> "PrecisionConfig":
        return PrecisionConfig(
            mantissa_bits=mantissa_bits,
            derivative_step=self.derivative_step,
            tolerance_policy=self.tolerance_policy,
        )
