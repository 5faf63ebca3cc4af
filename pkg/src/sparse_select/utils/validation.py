"""
Validação de inputs e dados para o sistema sparse_select.
"""
from typing import Iterable, Sequence, Tuple

import numpy as np

from ..core.exceptions import DataError


def validate_probability(value: float, name: str = "q", *, allow_one: bool = False) -> float:
    """
    Valida um nível/probabilidade no intervalo (0, 1) ou (0, 1].

    Args:
        value: Valor a validar
        name: Nome do parâmetro (para a mensagem de erro)
        allow_one: Se o valor 1 é aceito

    Returns:
        Valor validado como float

    Raises:
        ValueError: Se o valor estiver fora do intervalo

    Examples:
        >>> validate_probability(0.2)
        0.2
        >>> validate_probability(1.0, "threshold", allow_one=True)
        1.0
    """
    value = float(value)
    upper_ok = value <= 1.0 if allow_one else value < 1.0
    if not (value > 0.0 and upper_ok):
        interval = "(0, 1]" if allow_one else "(0, 1)"
        raise ValueError(f"{name} deve estar em {interval}, recebido {value}")
    return value


def validate_support(support: Iterable[int], p: int) -> Tuple[int, ...]:
    """
    Valida um conjunto de índices de colunas.

    Args:
        support: Índices (base 0)
        p: Número de colunas disponíveis

    Returns:
        Tupla ordenada de índices únicos

    Raises:
        ValueError: Se houver índices repetidos ou fora do intervalo

    Examples:
        >>> validate_support([3, 1], 5)
        (1, 3)
    """
    indices = [int(j) for j in support]
    if len(set(indices)) != len(indices):
        raise ValueError(f"Suporte contém índices repetidos: {indices}")
    for j in indices:
        if j < 0 or j >= p:
            raise ValueError(f"Índice {j} fora do intervalo [0, {p})")
    return tuple(sorted(indices))


def validate_column_name(name: str, columns: Sequence[str]) -> str:
    """
    Valida que a coluna existe no cabeçalho.

    Args:
        name: Nome da coluna
        columns: Colunas disponíveis

    Returns:
        Nome validado

    Raises:
        DataError: Se a coluna não existir
    """
    if not name or not name.strip():
        raise DataError("Nome de coluna não pode ser vazio")
    name = name.strip()
    if name not in columns:
        raise DataError(f"missing-column: coluna '{name}' não encontrada no cabeçalho")
    return name


def validate_lambda_values(values: np.ndarray) -> np.ndarray:
    """
    Valida uma sequência de penalidades do SLOPE.

    A sequência deve ser finita, não negativa, não crescente e não nula.

    Args:
        values: Vetor de penalidades

    Returns:
        Cópia float64 somente leitura

    Raises:
        ValueError: Se a sequência for inválida
    """
    values = np.array(values, dtype=float, copy=True).ravel()
    if values.size == 0:
        raise ValueError("Sequência lambda não pode ser vazia")
    if not np.all(np.isfinite(values)):
        raise ValueError("Sequência lambda deve ser finita")
    if np.any(values < 0):
        raise ValueError("Sequência lambda deve ser não negativa")
    if np.any(np.diff(values) > 0):
        raise ValueError("Sequência lambda deve ser não crescente")
    if not np.any(values > 0):
        raise ValueError("Sequência lambda não pode ser toda nula")
    values.setflags(write=False)
    return values
