"""Semi-supervised two-class normal discriminant analysis with an
informative missing-label mechanism.

The package provides the canonical Gaussian model and its Bayes rule, the
logistic missing-label selection model, full-likelihood estimation, exact
per-observation Fisher-information decompositions about the discriminant
coefficients, asymptotic relative efficiencies, and a Monte Carlo engine for
finite-sample relative-efficiency studies.
"""

__version__ = "0.1.0"

from .dataset import Dataset, read_dataset_csv, write_dataset_csv
from .efficiency import (
    AREResult,
    are_full,
    are_ignore_mcar,
    excess_error_coeff,
    general_prior_are,
    mcar_grid,
    table_grid,
)
from .errors import (
    ConditioningError,
    DataError,
    DegenerateCovarianceError,
    MissdaError,
    QuadratureError,
    UndefinedRuleError,
)
from .estimation import FitConfig, FitResult, fit_complete, fit_full, fit_ignore
from .information import (
    InfoBlocks,
    info_cc_beta,
    info_clr_beta,
    info_full_beta,
    info_ig_beta,
    info_miss_beta,
    info_miss_blocks,
)
from .likelihood import (
    LogLikValue,
    grad_loglik,
    loglik_complete,
    loglik_full,
    loglik_ignore,
    loglik_miss,
)
from .missingness import (
    DISCRIMINANT_SQUARE,
    ENTROPY,
    MCAR,
    MECHANISMS,
    FullParams,
    MissParams,
    gamma,
    gamma_canonical,
    q_prob,
)
from .model import (
    CanonicalModel,
    DiscriminantCoeffs,
    ThetaParams,
    bayes_allocate,
    beta_from_theta,
    canonical_theta,
    conditional_error,
    discriminant,
    entropy,
    optimal_error,
    posterior,
)
from .montecarlo import (
    GeneratedSample,
    SimConfig,
    SimResult,
    bootstrap_se,
    gen_dataset,
    run_replications,
)
from .quadrature import mixture_expectation, two_normal_expectation

__all__ = [
    "__version__",
    "AREResult", "CanonicalModel", "ConditioningError", "DISCRIMINANT_SQUARE",
    "DataError", "Dataset", "DegenerateCovarianceError", "DiscriminantCoeffs",
    "ENTROPY", "FitConfig", "FitResult", "FullParams", "GeneratedSample",
    "InfoBlocks", "LogLikValue", "MCAR", "MECHANISMS", "MissParams",
    "MissdaError", "QuadratureError", "SimConfig", "SimResult", "ThetaParams",
    "UndefinedRuleError", "are_full", "are_ignore_mcar", "bayes_allocate",
    "beta_from_theta", "bootstrap_se", "canonical_theta", "conditional_error",
    "discriminant", "entropy", "excess_error_coeff", "fit_complete",
    "fit_full", "fit_ignore", "gamma", "gamma_canonical", "gen_dataset",
    "general_prior_are", "grad_loglik", "info_cc_beta", "info_clr_beta",
    "info_full_beta", "info_ig_beta", "info_miss_beta", "info_miss_blocks",
    "loglik_complete", "loglik_full", "loglik_ignore", "loglik_miss",
    "mcar_grid", "mixture_expectation", "optimal_error", "posterior",
    "q_prob", "read_dataset_csv", "run_replications", "table_grid",
    "two_normal_expectation", "write_dataset_csv",
]
