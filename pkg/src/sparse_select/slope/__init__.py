"""SLOPE, LASSO e validação cruzada."""
from .cross_validation import CvResult, cv_select, fold_assignment
from .lambdas import LambdaRule, LambdaSequence, make_lambda
from .solver import MeanShiftFit, PathPoint, SlopeFit, fit_mean_shift, fit_slope, slope_path
from .sorted_l1 import clusters, kkt_residual, prox_sorted_l1, sorted_l1_norm

__all__ = [
    "CvResult",
    "LambdaRule",
    "LambdaSequence",
    "MeanShiftFit",
    "PathPoint",
    "SlopeFit",
    "clusters",
    "cv_select",
    "fit_mean_shift",
    "fit_slope",
    "fold_assignment",
    "kkt_residual",
    "make_lambda",
    "prox_sorted_l1",
    "slope_path",
    "sorted_l1_norm",
]
