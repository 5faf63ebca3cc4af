"""Filtro knockoff model-X gaussiano."""
from .filter import (
    KnockoffResult,
    equicorrelated_s,
    knockoff_filter,
    knockoff_stats,
    knockoff_threshold,
    make_knockoffs,
)

__all__ = [
    "KnockoffResult",
    "equicorrelated_s",
    "knockoff_filter",
    "knockoff_stats",
    "knockoff_threshold",
    "make_knockoffs",
]
