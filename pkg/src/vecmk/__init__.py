"""Certified norms of Hilbert-space-valued measures on finite metric spaces."""

from .errors import (
    DomainError,
    InputError,
    MassNotZero,
    NonConvergence,
    NotBalanced,
    VecMKError,
)
from .functions import FunctionSample, integrate, separating_g, urysohn
from .linalg import complexify_to_real, inner
from .measures import DiscreteVectorMeasure, dirac, dirac_difference
from .norms import (
    NormKind,
    hanin_norm,
    induced_metric,
    mk_norm,
    mkstar_norm,
    norm,
    variation_norm,
    weak_seminorm,
)
from .solvers import (
    BLSplit,
    BLUnit,
    FlowField,
    LipOnly,
    NormCertificate,
    SolverConfig,
    beckmann_min,
    maximize_linear_over_ball,
    project_lip_ball,
    scalar_kr_exact,
)
from .space import FiniteMetricSpace, from_coords, interval_grid, validate

__version__ = "0.1.0"

__all__ = [
    "BLSplit", "BLUnit", "DiscreteVectorMeasure", "DomainError", "FiniteMetricSpace",
    "FlowField", "FunctionSample", "InputError", "LipOnly", "MassNotZero", "NonConvergence",
    "NormCertificate", "NormKind", "NotBalanced", "SolverConfig", "VecMKError",
    "beckmann_min", "complexify_to_real", "dirac", "dirac_difference", "from_coords",
    "hanin_norm", "induced_metric", "inner", "integrate", "interval_grid",
    "maximize_linear_over_ball", "mk_norm", "mkstar_norm", "norm", "project_lip_ball",
    "scalar_kr_exact", "separating_g", "urysohn", "validate", "variation_norm", "weak_seminorm",
]
