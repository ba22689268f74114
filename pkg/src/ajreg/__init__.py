"""Least-squares regression on ANOVA-truncated Jacobi polynomial spaces."""
from .analysis import (
    bias_variance_report,
    chernoff_bound,
    gershgorin_cap,
    project,
    projection_error,
    risk_bound,
    spectrum,
)
from .estimator import (
    FittedModel,
    JacobiAnovaFeatures,
    JacobiAnovaRegressor,
    build_design,
    fit,
    gram,
    mse,
    predict,
    predict_truncated,
)
from .exceptions import (
    AsymmetryError,
    BudgetExceededError,
    DomainError,
    NumericalError,
    RankDeficiencyError,
    UndersampledError,
)
from .polynomials import JacobiParams, QuadratureRule, eval_normalized, gauss_jacobi, norm_constant
from .sampling import SampleSet, apply_target, sample_beta
from .space import AnovaIndex, BasisSpace, dimension, enumerate_space, eval_basis, eval_phi

__version__ = "0.1.0"
