"""Busca stepwise de modelos."""
from .stepwise import (
    FitResult,
    TraceEntry,
    backward,
    forward,
    k_cap,
    marginal_p_values,
    marginal_screen,
    run_plan,
    stepwise,
)

__all__ = [
    "FitResult",
    "TraceEntry",
    "backward",
    "forward",
    "k_cap",
    "marginal_p_values",
    "marginal_screen",
    "run_plan",
    "stepwise",
]
