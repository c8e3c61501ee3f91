"""Group-theoretic dimension and partial-maxima growth of stationary SaS random fields."""

from .action import (
    ActionSpec, Classification, ConsistencyError, DimensionError, KernelLattice,
    classify, effective_dimension, is_conservative, kernel_lattice,
)
from .analysis import (
    FrechetFit, ScalingReport, estimate_scaling_exponent, frechet_cdf, frechet_gof,
    frechet_quantile, limit_scale_prediction,
)
from .lattice import (
    QuotientDecomposition, SnfResult, covering_constant_search, lattice_rank,
    quotient_decomposition, smith_normal_form, verify_covering,
)
from .quadratic import QuadraticNumber
from .simulator import (
    BudgetError, FieldModel, FieldSample, GridSpec, MaximaDataset, bT_exact_indicator,
    bT_numeric, level_diagnostic, load_bundled, partial_maxima, sample_standard_sas, simulate_field,
    tail_constant,
)

__version__ = "0.1.0"
