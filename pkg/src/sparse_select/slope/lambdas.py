"""
Sequências de penalidades λ para SLOPE e LASSO.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Sequence, Union

import numpy as np
from scipy.stats import norm

from ..utils.logging_setup import get_logger
from ..utils.validation import validate_lambda_values, validate_probability

logger = get_logger(__name__)


class LambdaRule(str, Enum):
    """Regras geradoras de sequências λ."""
    BH = "bh"
    SECOND_ORDER = "second-order"
    INFLATED_BH = "inflated-bh"
    HEURISTIC = "heuristic"
    CONSTANT = "constant"
    BONFERRONI = "bonferroni"
    MEAN_SHIFT = "mean-shift"
    EXPLICIT = "explicit"


@dataclass(frozen=True)
class LambdaSequence:
    """
    Vetor de penalidades não crescente, marcado com a regra geradora.

    Attributes:
        values: λ_1 >= ... >= λ_p >= 0, não todos nulos
        rule: Regra geradora
        params: Parâmetros usados pela regra
        truncated: True se a recursão heurística foi truncada (n - i - 2 <= 0)
    """
    values: np.ndarray
    rule: LambdaRule = LambdaRule.EXPLICIT
    params: Dict[str, Any] = field(default_factory=dict)
    truncated: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", validate_lambda_values(self.values))
        object.__setattr__(self, "rule", LambdaRule(self.rule))

    def __len__(self) -> int:
        return int(self.values.size)

    def scaled(self, factor: float) -> "LambdaSequence":
        """Sequência multiplicada por um fator positivo."""
        if factor <= 0:
            raise ValueError(f"Fator deve ser positivo, recebido {factor}")
        params = dict(self.params)
        params["scale_factor"] = params.get("scale_factor", 1.0) * factor
        return LambdaSequence(self.values * factor, self.rule, params, self.truncated)


def bh_sequence(p: int, q: float, c: float = 1.0) -> np.ndarray:
    """λ_j = c Φ⁻¹(1 - jq/2p), j = 1..p."""
    j = np.arange(1, p + 1)
    return c * norm.isf(j * q / (2.0 * p))


def _heuristic(p: int, q: float, sigma: float, n: int) -> tuple[np.ndarray, bool]:
    # recursão em unidades de σ
    z = norm.isf(np.arange(1, p + 1) * q / (2.0 * p))
    values = np.empty(p)
    values[0] = z[0]
    total = values[0] ** 2
    truncated = False
    for i in range(2, p + 1):
        denominator = n - i - 2
        if denominator <= 0:
            values[i - 1:] = values[i - 2]
            truncated = True
            break
        candidate = z[i - 1] * math.sqrt(1.0 + total / denominator)
        values[i - 1] = min(values[i - 2], candidate)
        total += values[i - 1] ** 2
    return sigma * values, truncated


def make_lambda(
    rule: Union[LambdaRule, str],
    p: int,
    *,
    q: float = 0.2,
    c: float = 1.0,
    scale: float = 1.0,
    delta: float = 0.0,
    sigma: float = 1.0,
    n: Optional[int] = None,
    value: Optional[float] = None,
    values: Optional[Sequence[float]] = None,
) -> LambdaSequence:
    """
    Gera uma sequência λ de comprimento p.

    Args:
        rule: bh, second-order, inflated-bh, heuristic, constant,
            bonferroni, mean-shift ou explicit
        p: Comprimento da sequência
        q: Nível nominal (bh, inflated-bh, heuristic, bonferroni)
        c: Multiplicador da sequência BH
        scale: Constante de proporcionalidade de second-order
        delta: Inflação de inflated-bh (> 0)
        sigma: Desvio-padrão do ruído (heuristic, bonferroni, mean-shift)
        n: Tamanho amostral (heuristic)
        value: λ constante (constant)
        values: Vetor explícito (explicit)

    Returns:
        Sequência validada

    Raises:
        ValueError: Parâmetros inválidos para a regra

    Examples:
        >>> lam = make_lambda("bh", 1000, q=0.2)
        >>> round(float(lam.values[0]), 3), round(float(lam.values[-1]), 4)
        (3.719, 1.2816)
    """
    rule = LambdaRule(rule)
    if p < 1:
        raise ValueError(f"p deve ser positivo, recebido {p}")
    truncated = False
    params: Dict[str, Any] = {}

    if rule in (LambdaRule.BH, LambdaRule.INFLATED_BH, LambdaRule.HEURISTIC, LambdaRule.BONFERRONI):
        q = validate_probability(q, "q")
        params["q"] = q

    if rule == LambdaRule.BH:
        seq = bh_sequence(p, q, c)
        params["c"] = c
    elif rule == LambdaRule.INFLATED_BH:
        if delta <= 0:
            raise ValueError(f"delta deve ser positivo, recebido {delta}")
        seq = (1.0 + delta) * bh_sequence(p, q, c)
        params.update(c=c, delta=delta)
    elif rule == LambdaRule.SECOND_ORDER:
        seq = scale * np.sqrt(2.0 * np.log(p / np.arange(1, p + 1)))
        params["scale"] = scale
    elif rule == LambdaRule.HEURISTIC:
        if n is None:
            raise ValueError("A regra heuristic requer n")
        seq, truncated = _heuristic(p, q, sigma, n)
        params.update(sigma=sigma, n=n)
        if truncated:
            logger.warning("Sequência heurística truncada (n=%d, p=%d): cauda constante", n, p)
    elif rule == LambdaRule.CONSTANT:
        if value is None:
            raise ValueError("A regra constant requer value")
        seq = np.full(p, float(value))
        params["value"] = float(value)
    elif rule == LambdaRule.BONFERRONI:
        seq = np.full(p, sigma * norm.isf(q / (2.0 * p)))
        params["sigma"] = sigma
    elif rule == LambdaRule.MEAN_SHIFT:
        seq = sigma * np.sqrt(np.log(2.0 * p / np.arange(1, p + 1)))
        params["sigma"] = sigma
    else:
        if values is None:
            raise ValueError("A regra explicit requer values")
        seq = np.asarray(values, dtype=float)
        if seq.size != p:
            raise ValueError(f"values tem {seq.size} entradas, esperado {p}")

    return LambdaSequence(values=seq, rule=rule, params=params, truncated=truncated)
