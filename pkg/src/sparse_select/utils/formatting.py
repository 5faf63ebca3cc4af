"""
Funções de formatação e conversão de resultados para dicionários serializáveis.
"""
from __future__ import annotations

import math
from enum import Enum
from typing import Any, Dict, Mapping, Sequence

import numpy as np


def format_namespace(namespace: str) -> str:
    """
    Formata namespace para uso em nomes de tools MCP.

    Args:
        namespace: Namespace a formatar

    Returns:
        Namespace formatado (vazio ou com "_" no final)

    Examples:
        >>> format_namespace("")
        ''
        >>> format_namespace("stats")
        'stats_'
    """
    return f"{namespace}_" if namespace else ""


def to_builtin(value: Any) -> Any:
    """
    Converte arrays, escalares numpy, enums e tuplas em tipos JSON.

    Valores não finitos viram None.

    Examples:
        >>> to_builtin({"a": np.float64(1.5), "b": (np.int64(2),), "c": float("inf")})
        {'a': 1.5, 'b': [2], 'c': None}
    """
    if isinstance(value, Mapping):
        return {(key.value if isinstance(key, Enum) else str(key)): to_builtin(item) for key, item in value.items()}
    if isinstance(value, np.ndarray):
        return [to_builtin(item) for item in value.tolist()]
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value) if isinstance(value, (set, frozenset)) else value
        return [to_builtin(item) for item in items]
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def fit_result_dict(result: Any, names: Sequence[str]) -> Dict[str, Any]:
    """
    Converte o resultado de uma busca por critério em dicionário.

    Args:
        result: FitResult
        names: Nomes de todas as colunas

    Returns:
        Dicionário com suporte, nomes, coeficientes, critério, traço e diagnósticos
    """
    return to_builtin({
        "criterion": result.criterion.kind,
        "criterion_value": result.criterion_value,
        "support": list(result.support),
        "selected": [names[j] for j in result.support],
        "coefficients": {names[j]: c for j, c in zip(result.support, result.coefficients)},
        "intercept": result.intercept,
        "flags": sorted(result.flags),
        "trace": [
            {"action": e.action, "variable": None if e.index is None else names[e.index],
             "value": e.value, "stage": e.stage}
            for e in result.trace
        ],
        "diagnostics": result.diagnostics,
    })


def slope_fit_dict(fit: Any, names: Sequence[str], intercept: float) -> Dict[str, Any]:
    """Resumo de um ajuste SLOPE/LASSO na escala original."""
    return to_builtin({
        "support": list(fit.support),
        "selected": [names[j] for j in fit.support],
        "coefficients": {names[j]: fit.coefficients[j] for j in fit.support},
        "intercept": intercept,
        "clusters": [[names[j] for j in group] for group in fit.clusters],
        "objective": fit.objective,
        "kkt_residual": fit.kkt_residual,
        "iterations": fit.iterations,
        "converged": fit.converged,
    })


def knockoff_dict(result: Any, names: Sequence[str]) -> Dict[str, Any]:
    return to_builtin({
        "selected": [names[j] for j in result.selected],
        "support": list(result.selected),
        "threshold": result.threshold,
        "q": result.q,
        "W": {name: w for name, w in zip(names, result.W)},
    })


def format_selection_summary(selected: Sequence[str], label: str) -> str:
    """
    Resumo textual de uma seleção.

    Examples:
        >>> format_selection_summary(["x3", "x7"], "mbic2")
        'mbic2: 2 variáveis (x3, x7)'
        >>> format_selection_summary([], "bic")
        'bic: nenhuma variável selecionada'
    """
    if not selected:
        return f"{label}: nenhuma variável selecionada"
    return f"{label}: {len(selected)} variáveis ({', '.join(selected)})"
