"""Sparse vector autoregression by column-wise L1 linear programs.

The main entry point is :func:`estimate_direct`, which estimates the
transition matrices of a stationary VAR(p) process from the marginal and
lag-1 sample covariances of the stacked series.  Ridge and lasso baselines,
rolling cross-validation, synthetic data generators and a benchmark harness
live alongside it.
"""

from .covest import CovPair, sample_covariances
from .datagen import PatternKind, SigmaSpec, gen_pattern, make_var1_model, make_varp_model, rescale_spectral
from .errors import DirvarError
from .estimators import (
    DirectEstimate,
    TuningInputs,
    estimate_direct,
    estimate_lasso,
    estimate_ridge,
    symmetrize,
    theoretical_lambda,
    truncate,
)
from .evaluation import CvResult, ErrorReport, cross_validate, error_norms, predict_next, sign_metrics
from .linalg import NormKind, matrix_norm
from .varproc import TimeSeries, VarModel, simulate, stationary_covariance

__version__ = "0.1.0"

__all__ = [
    "CovPair", "CvResult", "DirectEstimate", "DirvarError", "ErrorReport", "NormKind",
    "PatternKind", "SigmaSpec", "TimeSeries", "TuningInputs", "VarModel",
    "cross_validate", "error_norms", "estimate_direct", "estimate_lasso", "estimate_ridge",
    "gen_pattern", "make_var1_model", "make_varp_model", "matrix_norm", "predict_next",
    "rescale_spectral", "sample_covariances", "sign_metrics", "simulate",
    "stationary_covariance", "symmetrize", "theoretical_lambda", "truncate",
]
