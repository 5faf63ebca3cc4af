"""Critérios de informação com penalidade L0."""
from .likelihood import (
    SubmodelFit,
    criterion_value,
    evaluate_support,
    fit_submodel,
    multiple_r2,
    neg2_loglik,
    significance_flags,
    submodel_diagnostics,
)
from .penalties import (
    FIXED_THRESHOLD_KINDS,
    abdj_penalty,
    bh_penalty,
    log_factorial,
    normal_tail_bounds,
    orthogonal_threshold,
    penalty,
)

__all__ = [
    "FIXED_THRESHOLD_KINDS",
    "SubmodelFit",
    "abdj_penalty",
    "bh_penalty",
    "criterion_value",
    "evaluate_support",
    "fit_submodel",
    "log_factorial",
    "multiple_r2",
    "neg2_loglik",
    "normal_tail_bounds",
    "orthogonal_threshold",
    "penalty",
    "significance_flags",
    "submodel_diagnostics",
]
