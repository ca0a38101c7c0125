"""Geostatistical estimation under geomasking (positional error).

Library surface: spatial correlation models and variograms, the Rice law of
perturbed pair distances, masking samplers, and a panel of estimators
(naive/corrected variogram WLS, naive maximum likelihood, and pairwise
composite likelihood with QMC integration over the positional-error law).
"""

from .geomask import (
    PositionalErrorSpec,
    approximation_check,
    mask_locations,
    pair_distance_scale,
    pair_law,
    uniform_pair_distance_sample,
)
from .inference import (
    CLConfig,
    FitResult,
    cl_fit,
    cl_loglik,
    cl_pair_loglik,
    gaussian_loglik,
    geonaive_fit,
    mcfl_loglik,
    wls_variogram_fit,
)
from .rice import (
    RiceParams,
    rice_cdf,
    rice_logpdf,
    rice_mean_var,
    rice_pdf,
    rice_quantile,
    rice_quantile_nodes,
    rice_sample,
)
from .simstudy import Scenario, StudyResult, generate_locations, run_study, simulate_gp
from .spatial import (
    CorrelationKind,
    EmpiricalVariogram,
    GaussianLimit,
    GeoDataset,
    Matern,
    ModelParams,
    corrected_variogram,
    correlation,
    empirical_variogram,
    gaussian_masked_correlation_closed_form,
    masked_correlation,
    practical_range,
    true_variogram,
)

__all__ = [
    "CLConfig",
    "CorrelationKind",
    "EmpiricalVariogram",
    "FitResult",
    "GaussianLimit",
    "GeoDataset",
    "Matern",
    "ModelParams",
    "PositionalErrorSpec",
    "RiceParams",
    "Scenario",
    "StudyResult",
    "approximation_check",
    "cl_fit",
    "cl_loglik",
    "cl_pair_loglik",
    "corrected_variogram",
    "correlation",
    "empirical_variogram",
    "gaussian_loglik",
    "gaussian_masked_correlation_closed_form",
    "generate_locations",
    "geonaive_fit",
    "mask_locations",
    "masked_correlation",
    "mcfl_loglik",
    "pair_distance_scale",
    "pair_law",
    "practical_range",
    "rice_cdf",
    "rice_logpdf",
    "rice_mean_var",
    "rice_pdf",
    "rice_quantile",
    "rice_quantile_nodes",
    "rice_sample",
    "run_study",
    "simulate_gp",
    "true_variogram",
    "uniform_pair_distance_sample",
    "wls_variogram_fit",
]

__version__ = "1.0.0"
