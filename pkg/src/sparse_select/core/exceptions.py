"""
Hierarquia de exceções do sparse_select.

DataError cobre problemas nos dados de entrada (coluna ausente, célula não
numérica, resposta binária inválida, coluna constante, covariância não
positiva definida). FitError cobre falhas de ajuste.
"""


class SparseSelectError(Exception):
    """Base de todas as exceções do pacote."""


class DataError(SparseSelectError, ValueError):
    """Dados de entrada inválidos."""


class FitError(SparseSelectError, RuntimeError):
    """Falha ao ajustar um modelo."""


class RankDeficientError(FitError):
    """Submatriz de desenho com posto incompleto."""


class ConvergenceError(FitError):
    """Algoritmo iterativo não convergiu no número máximo de iterações."""
