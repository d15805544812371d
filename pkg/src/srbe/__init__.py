"""Stochastic restricted biased estimators under omitted-variable misspecification."""

from .canonical import (
    CanonicalForm,
    RestrictionSystem,
    SampleModel,
    build_canonical,
    design_diagnostics,
    ols_fit,
    plugin_model,
    simultaneous_decompose,
)
from .comparison import (
    ComparisonVerdict,
    Level,
    Precondition,
    Verdict,
    compare,
    compare_estimators,
    compare_predictors,
    pairwise_matrix,
)
from .datasets import Dataset, builtin_rnd_dataset, load_csv, write_csv
from .errors import NumericalError, SrbeError, ValidationError
from .estimators import (
    ALL_KINDS,
    EstimatorMoments,
    EstimatorSpec,
    Kind,
    estimate,
    estimate_mre,
    factor_matrix,
    moments,
    smse_grid,
)
from .predictors import PredictorMoments, predict, predictor_moments, predictor_smse
from .simulation import SimConfig, SimResult, run_monte_carlo

__version__ = "0.1.0"

__all__ = [
    "ALL_KINDS",
    "build_canonical",
    "builtin_rnd_dataset",
    "CanonicalForm",
    "compare",
    "compare_estimators",
    "compare_predictors",
    "ComparisonVerdict",
    "Dataset",
    "design_diagnostics",
    "estimate",
    "estimate_mre",
    "EstimatorMoments",
    "EstimatorSpec",
    "factor_matrix",
    "Kind",
    "Level",
    "load_csv",
    "moments",
    "NumericalError",
    "ols_fit",
    "pairwise_matrix",
    "plugin_model",
    "Precondition",
    "predict",
    "predictor_moments",
    "predictor_smse",
    "PredictorMoments",
    "RestrictionSystem",
    "run_monte_carlo",
    "SampleModel",
    "SimConfig",
    "SimResult",
    "simultaneous_decompose",
    "smse_grid",
    "SrbeError",
    "ValidationError",
    "Verdict",
    "write_csv",
]
