"""Bound-family type definitions."""

from decimal import Decimal
from enum import Enum
from typing import Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator


class BoundFamily(str, Enum):
    """Families of arcsin bounds on [0, 1].

    ALGEBRAIC_SHAFER     (b+1)x / (b + sqrt(1-x^2))
    ALGEBRAIC_TWO_PARAM  alpha x / (beta + sqrt(1-x^2))
    SQRT_TWO_PARAM       alpha (sqrt(1+x) - sqrt(1-x)) / (beta + sqrt(1+x) + sqrt(1-x))
    SQRT_MATCHED         SQRT_TWO_PARAM with alpha = beta + 2
    """

    ALGEBRAIC_SHAFER = "algebraic_shafer"
    ALGEBRAIC_TWO_PARAM = "algebraic_two_param"
    SQRT_TWO_PARAM = "sqrt_two_param"
    SQRT_MATCHED = "sqrt_matched"

    @property
    def takes_alpha(self) -> bool:
        return self in (BoundFamily.ALGEBRAIC_TWO_PARAM, BoundFamily.SQRT_TWO_PARAM)

    @property
    def is_algebraic(self) -> bool:
        return self in (BoundFamily.ALGEBRAIC_SHAFER, BoundFamily.ALGEBRAIC_TWO_PARAM)


class ConstantName(str, Enum):
    """Symbolic parameters resolved at the evaluation precision."""

    SHAFER_B = "shafer_b"
    MALESEVIC_B = "malesevic_b"
    SHAFER_BETA = "shafer_beta"
    B1 = "b1"
    ZHU_ALPHA = "zhu_alpha"
    CROSSOVER_C = "crossover_c"
    PI = "pi"


class ReferenceCurve(str, Enum):
    """Curves that are compared against bounds but are not bounds themselves."""

    ARCSIN = "arcsin"


class Ordering(str, Enum):
    """Pointwise ordering of two curves."""

    GREATER = "greater"
    EQUAL = "equal"
    LESS = "less"


Parameter = Union[ConstantName, Decimal]


class BoundSpec(BaseModel):
    """A bound family together with its parameters.

    Parameters are decimal literals or named constants. Named constants keep
    their exact meaning at every precision, which matters for b1 where the
    bound touches arcsin at x = 1.
    """

    model_config = ConfigDict(frozen=True)

    family: BoundFamily = Field(..., description="Bound family")
    beta: Parameter = Field(..., description="Denominator offset (b or beta)")
    alpha: Optional[Parameter] = Field(
        None, description="Numerator constant, two-parameter families only"
    )

    @model_validator(mode="after")
    def _check_parameters(self) -> "BoundSpec":
        if self.family.takes_alpha:
            if self.alpha is None:
                raise ValueError(f"{self.family.value} requires alpha")
            if isinstance(self.alpha, Decimal) and not self.alpha > 0:
                raise ValueError(f"alpha must be positive, got {self.alpha}")
        elif self.alpha is not None:
            raise ValueError(f"{self.family.value} does not take alpha")
        if isinstance(self.beta, Decimal) and not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        return self

    @classmethod
    def matched(cls, beta: Parameter) -> "BoundSpec":
        return cls(family=BoundFamily.SQRT_MATCHED, beta=beta)

    @classmethod
    def shafer(cls, b: Parameter) -> "BoundSpec":
        return cls(family=BoundFamily.ALGEBRAIC_SHAFER, beta=b)

    @classmethod
    def sqrt_two_param(cls, alpha: Parameter, beta: Parameter) -> "BoundSpec":
        return cls(family=BoundFamily.SQRT_TWO_PARAM, alpha=alpha, beta=beta)

    @classmethod
    def algebraic_two_param(cls, alpha: Parameter, beta: Parameter) -> "BoundSpec":
        return cls(family=BoundFamily.ALGEBRAIC_TWO_PARAM, alpha=alpha, beta=beta)

    def label(self) -> str:
        """Compact text form, parseable by the CLI (``family:alpha=..,beta=..``)."""
        parts = []
        if self.alpha is not None:
            parts.append(f"alpha={_param_text(self.alpha)}")
        parts.append(f"beta={_param_text(self.beta)}")
        return f"{self.family.value}:{','.join(parts)}"


def _param_text(value: Parameter) -> str:
    return value.value if isinstance(value, ConstantName) else str(value)


Curve = Union[BoundSpec, ReferenceCurve]


class NamedConstant(BaseModel):
    """A constant appearing in the theorems, with its closed form."""

    name: ConstantName = Field(..., description="Constant identifier")
    value: Decimal = Field(..., description="Value at the requested precision")
    closed_form: str = Field(..., description="Closed form or defining condition")
