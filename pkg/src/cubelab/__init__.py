"""cubelab: exact spectral analysis of submodular/XOS functions on {0,1}^n."""

__version__ = "0.1.0"

from .core import (
    CubeFunction,
    SparsePolynomial,
    Spectrum,
    derivative,
    eval_polynomial,
    influence,
    inverse_transform,
    l2_degree,
    level_weight,
    lp_norm,
    project,
    second_derivative,
    structured_tail,
    tail_weight,
    threshold_norm,
    total_influence,
    transform,
    truncate,
)
from .errors import (
    CoordinateError,
    CubeLabError,
    DimensionCapError,
    DomainError,
    RegressionError,
    SimplexError,
    SpecError,
)

__all__ = [
    "CubeFunction",
    "Spectrum",
    "SparsePolynomial",
    "transform",
    "inverse_transform",
    "derivative",
    "second_derivative",
    "lp_norm",
    "threshold_norm",
    "level_weight",
    "tail_weight",
    "structured_tail",
    "l2_degree",
    "influence",
    "total_influence",
    "project",
    "truncate",
    "eval_polynomial",
    "CubeLabError",
    "DimensionCapError",
    "CoordinateError",
    "DomainError",
    "SimplexError",
    "RegressionError",
    "SpecError",
    "__version__",
]
