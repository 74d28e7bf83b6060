"""Type definitions shared across the arcsin-bounds monorepo."""

from arcsin_bounds_shared.types.bounds import (
    BoundFamily,
    BoundSpec,
    ConstantName,
    Curve,
    NamedConstant,
    Ordering,
    Parameter,
    ReferenceCurve,
)
from arcsin_bounds_shared.types.precision import PrecisionConfig, TolerancePolicy

__all__ = [
    "BoundFamily",
    "BoundSpec",
    "ConstantName",
    "Curve",
    "NamedConstant",
    "Ordering",
    "Parameter",
    "PrecisionConfig",
    "ReferenceCurve",
    "TolerancePolicy",
]
