"""
Norma L1 ordenada J_λ, seu operador proximal e certificados de otimalidade.
"""
from typing import List, Tuple

import numpy as np
from sklearn.isotonic import isotonic_regression


def _sorted_abs(values: np.ndarray) -> np.ndarray:
    return np.sort(np.abs(values))[::-1]


def sorted_l1_norm(beta: np.ndarray, lam: np.ndarray) -> float:
    """
    J_λ(β) = Σ_j λ_j |β|_(j), com |β|_(1) >= ... >= |β|_(p).

    Examples:
        >>> sorted_l1_norm(np.array([1.0, -3.0, 2.0]), np.array([3.0, 2.0, 1.0]))
        14.0
    """
    beta = np.asarray(beta, dtype=float)
    lam = np.asarray(lam, dtype=float)
    if beta.shape != lam.shape:
        raise ValueError(f"β e λ têm tamanhos diferentes: {beta.shape} e {lam.shape}")
    return float(lam @ _sorted_abs(beta))


def prox_sorted_l1(v: np.ndarray, lam: np.ndarray) -> np.ndarray:
    """
    Operador proximal de J_λ: argmin_x ½‖x - v‖² + J_λ(x).

    Ordena |v| de forma decrescente, subtrai λ, aplica regressão isotônica
    decrescente (pool adjacent violators), trunca em zero e desfaz a
    ordenação restaurando os sinais.

    Args:
        v: Ponto de avaliação
        lam: Sequência não crescente e não negativa

    Returns:
        Vetor proximal
    """
    v = np.asarray(v, dtype=float)
    lam = np.asarray(lam, dtype=float)
    if v.shape != lam.shape:
        raise ValueError(f"v e λ têm tamanhos diferentes: {v.shape} e {lam.shape}")
    magnitude = np.abs(v)
    order = np.argsort(-magnitude, kind="stable")
    shifted = magnitude[order] - lam
    fitted = np.maximum(isotonic_regression(shifted, increasing=False), 0.0)
    out = np.empty_like(v)
    out[order] = fitted
    return np.sign(v) * out


def dual_infeasibility(g: np.ndarray, lam: np.ndarray) -> float:
    """
    Violação da viabilidade dual: max_k (Σ_{j<=k} |g|_(j) - Σ_{j<=k} λ_j) / max(1, Σ_{j<=k} λ_j).

    Relativa para somas de λ acima de 1 e absoluta abaixo. Zero quando g
    pertence à bola dual de J_λ.
    """
    cum_g = np.cumsum(_sorted_abs(g))
    cum_lam = np.cumsum(np.asarray(lam, dtype=float))
    ratio = (cum_g - cum_lam) / np.maximum(cum_lam, 1.0)
    return float(max(0.0, np.max(ratio)))


def kkt_residual(beta: np.ndarray, neg_grad: np.ndarray, lam: np.ndarray) -> float:
    """
    Resíduo KKT de min f(β) + J_λ(β) no ponto β.

    Combina a viabilidade dual de g = -∇f(β) com a complementaridade
    |J_λ(β) - g'β| / max(1, J_λ(β)).
    """
    penalty_value = sorted_l1_norm(beta, lam)
    gap = abs(penalty_value - float(neg_grad @ beta)) / max(1.0, penalty_value)
    return max(dual_infeasibility(neg_grad, lam), gap)


def clusters(beta: np.ndarray, tol: float = 1e-8) -> Tuple[Tuple[int, ...], ...]:
    """
    Grupos de coeficientes não nulos com |β_j| iguais até a tolerância.

    Returns:
        Grupos ordenados por magnitude decrescente, índices ordenados
    """
    beta = np.asarray(beta, dtype=float)
    magnitude = np.abs(beta)
    active = np.flatnonzero(magnitude > tol)
    if active.size == 0:
        return ()
    order = active[np.argsort(-magnitude[active], kind="stable")]
    groups: List[List[int]] = [[int(order[0])]]
    for previous, current in zip(order[:-1], order[1:]):
        if magnitude[previous] - magnitude[current] <= tol:
            groups[-1].append(int(current))
        else:
            groups.append([int(current)])
    return tuple(tuple(sorted(group)) for group in groups)
