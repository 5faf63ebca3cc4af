"""Seleção de variáveis esparsas: critérios L0, SLOPE/LASSO e knockoffs."""

__version__ = "0.1.0"

__all__ = ["__version__"]
