"""
Penalidades L0 dos critérios de informação e cotas analíticas associadas.
"""
import math
from typing import Tuple

import numpy as np
from scipy.special import gammaln
from scipy.stats import norm

from ..core.entities import CriterionKind, CriterionSpec

# Critérios cuja penalidade é linear em k (limiar fixo por variável)
FIXED_THRESHOLD_KINDS = frozenset({
    CriterionKind.AIC,
    CriterionKind.BIC,
    CriterionKind.RIC,
    CriterionKind.MBIC,
    CriterionKind.MAIC,
})


def log_factorial(k: int) -> float:
    """log k! via log-gama."""
    return float(gammaln(k + 1.0))


def log_binomial(p: int, k: int) -> float:
    """log C(p, k) via log-gama; -inf fora de 0 <= k <= p."""
    if k < 0 or k > p:
        return -math.inf
    return float(gammaln(p + 1.0) - gammaln(k + 1.0) - gammaln(p - k + 1.0))


def _p_total(spec: CriterionSpec) -> int:
    if spec.p_total is None:
        raise ValueError("CriterionSpec sem p_total; use spec.resolve(p)")
    return spec.p_total


def penalty(spec: CriterionSpec, k: int, n: int) -> float:
    """
    Penalidade L0 do critério para um modelo com k variáveis.

    Args:
        spec: Critério (com p_total definido)
        k: Tamanho do modelo
        n: Tamanho amostral

    Returns:
        Valor da penalidade; 0 para k = 0

    Examples:
        >>> spec = CriterionSpec(kind="mbic", p_total=1000)
        >>> round(penalty(spec, 2, 100), 4)
        31.2962
    """
    if k < 0:
        raise ValueError(f"k deve ser não negativo, recebido {k}")
    if k == 0:
        return 0.0
    p = _p_total(spec)
    log_n = math.log(n)
    kind = spec.kind
    if kind == CriterionKind.AIC:
        return 2.0 * k
    if kind == CriterionKind.BIC:
        return k * log_n
    if kind == CriterionKind.RIC:
        return 2.0 * k * math.log(p)
    if kind == CriterionKind.EBIC:
        if k > p:
            return math.inf
        return k * log_n + 2.0 * (1.0 - spec.kappa) * log_binomial(p, k)

    mbic = k * log_n + 2.0 * k * math.log(p / spec.E)
    maic = 2.0 * k + 2.0 * k * math.log(p / spec.const)
    if kind == CriterionKind.MBIC:
        return mbic
    if kind == CriterionKind.MAIC:
        return maic
    if kind == CriterionKind.MBIC2:
        return mbic - 2.0 * log_factorial(k)
    if kind == CriterionKind.MAIC2:
        return maic - 2.0 * log_factorial(k)
    raise ValueError(f"Critério desconhecido: {kind}")


def orthogonal_threshold(spec: CriterionSpec, n: int) -> float:
    """
    Limiar |Z_j| de admissão sob X'X = nI e σ conhecido.

    Para os critérios com penalidade linear em k, adicionar a coluna j
    diminui o critério se e somente se |Z_j| excede a raiz do incremento
    da penalidade por variável.

    Raises:
        ValueError: Para critérios sem limiar fixo (mBIC2, mAIC2, EBIC)
    """
    if spec.kind not in FIXED_THRESHOLD_KINDS:
        raise ValueError(f"{spec.kind.value} não tem limiar fixo por variável")
    return math.sqrt(penalty(spec, 1, n))


def bh_penalty(k: int, p: int, alpha: float) -> float:
    """Soma dos quadrados dos quantis normais q(αj/2p), j = 1..k."""
    if k <= 0:
        return 0.0
    j = np.arange(1, k + 1)
    return float(np.sum(norm.isf(alpha * j / (2.0 * p)) ** 2))


def abdj_penalty(k: int, p: int) -> float:
    """Penalidade minimax 2k log(p/k)."""
    if k <= 0:
        return 0.0
    return 2.0 * k * math.log(p / k)


def normal_tail_bounds(c: float) -> Tuple[float, float]:
    """
    Cotas inferior e superior de P(|Z| > c) para Z normal padrão.

    Args:
        c: Limiar (> 1)

    Returns:
        (2φ(c)/c (1 - c⁻²), 2φ(c)/c)
    """
    if c <= 1.0:
        raise ValueError(f"c deve ser maior que 1, recebido {c}")
    upper = 2.0 * norm.pdf(c) / c
    return upper * (1.0 - c ** -2), upper
