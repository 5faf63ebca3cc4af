"""
Solver de gradiente proximal acelerado (FISTA) para SLOPE e LASSO.

Perdas suportadas: quadrática ½‖y - Xβ‖² (dados centralizados, sem
intercepto) e logística com intercepto não penalizado. Inclui o modelo
mean-shift para outliers, que é um SLOPE aumentado separável.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import expit

from ..core.config import SolverConfig
from ..core.dataset import Dataset
from ..core.entities import Family
from ..utils.logging_setup import get_logger
from .lambdas import LambdaSequence
from .sorted_l1 import clusters, kkt_residual, prox_sorted_l1, sorted_l1_norm

logger = get_logger(__name__)

LambdaLike = Union[LambdaSequence, np.ndarray, Sequence[float]]


def _lam_values(lam: LambdaLike) -> np.ndarray:
    if isinstance(lam, LambdaSequence):
        return lam.values
    return LambdaSequence(np.asarray(lam, dtype=float)).values


def power_iteration(A: np.ndarray, iterations: int = 20, seed: int = 0) -> float:
    """Estimativa de λ_max(A'A) pelo método da potência."""
    v = np.random.default_rng(seed).standard_normal(A.shape[1])
    v /= np.linalg.norm(v)
    estimate = 0.0
    for _ in range(iterations):
        w = A.T @ (A @ v)
        estimate = float(np.linalg.norm(w))
        if estimate == 0.0:
            return 0.0
        v = w / estimate
    return estimate


@dataclass(frozen=True)
class SlopeFit:
    """
    Solução de SLOPE.

    Attributes:
        coefficients: β̂
        intercept: Intercepto (0 para a perda quadrática)
        objective: Perda + J_λ(β̂), recalculável a partir de β̂
        kkt_residual: Resíduo KKT na saída
        iterations: Iterações executadas
        converged: Se o critério de parada foi atingido
        clusters: Grupos de |β̂_j| > 0 iguais
        lam: Sequência usada
        loss: Família da perda
    """
    coefficients: np.ndarray
    intercept: float
    objective: float
    kkt_residual: float
    iterations: int
    converged: bool
    clusters: Tuple[Tuple[int, ...], ...]
    lam: np.ndarray
    loss: Family = Family.GAUSSIAN

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(sorted(j for group in self.clusters for j in group))

    @property
    def n_nonzero(self) -> int:
        return len(self.support)

    @property
    def n_clusters(self) -> int:
        return len(self.clusters)


@dataclass(frozen=True)
class MeanShiftFit:
    """Solução conjunta (β̂, μ̂) do modelo mean-shift."""
    beta: np.ndarray
    mu: np.ndarray
    objective: float
    kkt_residual: float
    iterations: int
    converged: bool

    @property
    def outliers(self) -> Tuple[int, ...]:
        return tuple(int(i) for i in np.flatnonzero(self.mu != 0.0))


# =============================================================================
# Perdas suaves
# =============================================================================

def _gaussian_loss(X: np.ndarray, y: np.ndarray) -> Callable[[np.ndarray], Tuple[float, np.ndarray]]:
    def value_grad(beta: np.ndarray) -> Tuple[float, np.ndarray]:
        resid = X @ beta - y
        return 0.5 * float(resid @ resid), X.T @ resid
    return value_grad


def _logistic_loss(X: np.ndarray, y: np.ndarray) -> Callable[[np.ndarray], Tuple[float, np.ndarray]]:
    # x = [intercepto, β]
    def value_grad(x: np.ndarray) -> Tuple[float, np.ndarray]:
        eta = x[0] + X @ x[1:]
        value = float(np.sum(np.logaddexp(0.0, eta) - y * eta))
        r = expit(eta) - y
        grad = np.empty_like(x)
        grad[0] = r.sum()
        grad[1:] = X.T @ r
        return value, grad
    return value_grad


# =============================================================================
# FISTA
# =============================================================================

def _fista(
    value_grad: Callable[[np.ndarray], Tuple[float, np.ndarray]],
    prox: Callable[[np.ndarray, float], np.ndarray],
    penalty: Callable[[np.ndarray], float],
    kkt: Callable[[np.ndarray, np.ndarray], float],
    x0: np.ndarray,
    lipschitz: float,
    config: SolverConfig,
) -> Tuple[np.ndarray, int, bool, float, List[float]]:
    """
    FISTA com busca linear por retrocesso e variante monótona com reinício.

    Returns:
        (melhor iterado, iterações, convergiu, resíduo KKT, histórico do objetivo)
    """
    L = max(lipschitz, 1e-12)
    x = x0.copy()
    f_x, g_x = value_grad(x)
    F_x = f_x + penalty(x)
    y, f_y, g_y = x.copy(), f_x, g_x
    t = 1.0
    history = [F_x]
    residual = kkt(x, g_x)
    if residual <= config.kkt_tol:
        return x, 0, True, residual, history

    iteration = 0
    converged = False
    for iteration in range(1, config.max_iter + 1):
        while True:
            z = prox(y - g_y / L, 1.0 / L)
            diff = z - y
            f_z, g_z = value_grad(z)
            if f_z <= f_y + float(g_y @ diff) + 0.5 * L * float(diff @ diff) + 1e-12 * abs(f_y):
                break
            L *= 2.0
        F_z = f_z + penalty(z)
        t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))

        if config.monotone and F_z > F_x:
            history.append(F_x)
            if t == 1.0:
                # passo proximal simples a partir de x também rejeitado: estagnação numérica
                residual = kkt(x, g_x)
                converged = residual <= config.kkt_tol
                break
            # reinicia o momento a partir de x
            y, f_y, g_y = x, f_x, g_x
            t = 1.0
            continue

        previous = F_x
        x_prev = x
        x, f_x, g_x, F_x = z, f_z, g_z, F_z
        y = x + ((t - 1.0) / t_next) * (x - x_prev)
        f_y, g_y = value_grad(y)
        t = t_next
        history.append(F_x)

        if abs(previous - F_x) <= config.tol * max(1.0, abs(F_x)) or iteration % 10 == 0:
            residual = kkt(x, g_x)
            if residual <= config.kkt_tol:
                converged = True
                break

    if not converged:
        residual = kkt(x, g_x)
        converged = residual <= config.kkt_tol
    return x, iteration, converged, residual, history


def fit_slope(
    d: Dataset,
    lam: LambdaLike,
    loss: Optional[Union[Family, str]] = None,
    *,
    config: Optional[SolverConfig] = None,
    warm_start: Optional[np.ndarray] = None,
    warm_intercept: float = 0.0,
) -> SlopeFit:
    """
    Resolve min_β perda(β) + J_λ(β) por FISTA.

    Args:
        d: Conjunto de dados (padronizado recomendado; a perda quadrática
            não tem intercepto)
        lam: Sequência λ de comprimento p
        loss: gaussian ou binomial (padrão: família do conjunto)
        config: Configuração do solver
        warm_start: β inicial
        warm_intercept: Intercepto inicial (binomial)

    Returns:
        Solução; converged=False se max_iter foi atingido (retorna o melhor iterado)
    """
    config = config or SolverConfig()
    values = _lam_values(lam)
    if values.size != d.p:
        raise ValueError(f"λ tem {values.size} entradas, X tem {d.p} colunas")
    loss = Family(loss) if loss is not None else d.family
    X, y = d.X, d.y
    beta0 = np.zeros(d.p) if warm_start is None else np.asarray(warm_start, dtype=float).copy()

    if loss == Family.GAUSSIAN:
        value_grad = _gaussian_loss(X, y)
        lipschitz = power_iteration(X, config.power_iterations)

        def prox(v: np.ndarray, step: float) -> np.ndarray:
            return prox_sorted_l1(v, step * values)

        def penalty(x: np.ndarray) -> float:
            return sorted_l1_norm(x, values)

        def kkt(x: np.ndarray, grad: np.ndarray) -> float:
            return kkt_residual(x, -grad, values)

        x0 = beta0
    else:
        value_grad = _logistic_loss(X, y)
        A = np.column_stack([np.ones(d.n), X])
        lipschitz = 0.25 * power_iteration(A, config.power_iterations)

        def prox(v: np.ndarray, step: float) -> np.ndarray:
            out = v.copy()
            out[1:] = prox_sorted_l1(v[1:], step * values)
            return out

        def penalty(x: np.ndarray) -> float:
            return sorted_l1_norm(x[1:], values)

        def kkt(x: np.ndarray, grad: np.ndarray) -> float:
            intercept_residual = abs(float(grad[0])) / max(1.0, float(values[0]))
            return max(kkt_residual(x[1:], -grad[1:], values), intercept_residual)

        x0 = np.concatenate([[warm_intercept], beta0])

    x, iterations, converged, residual, _ = _fista(value_grad, prox, penalty, kkt, x0, lipschitz, config)
    if loss == Family.GAUSSIAN:
        beta, intercept = x, 0.0
    else:
        beta, intercept = x[1:], float(x[0])
    objective = value_grad(x)[0] + sorted_l1_norm(beta, values)
    if not converged:
        logger.warning(
            "SLOPE não convergiu em %d iterações (resíduo KKT %.2e)", iterations, residual
        )
    return SlopeFit(
        coefficients=beta,
        intercept=intercept,
        objective=objective,
        kkt_residual=residual,
        iterations=iterations,
        converged=converged,
        clusters=clusters(beta, config.cluster_tol),
        lam=values,
        loss=loss,
    )


def slope_objective(d: Dataset, beta: np.ndarray, lam: LambdaLike, intercept: float = 0.0) -> float:
    """Perda + J_λ(β) recalculada a partir dos coeficientes."""
    values = _lam_values(lam)
    beta = np.asarray(beta, dtype=float)
    if d.family == Family.BINOMIAL:
        value, _ = _logistic_loss(d.X, d.y)(np.concatenate([[intercept], beta]))
    else:
        value, _ = _gaussian_loss(d.X, d.y)(beta)
    return value + sorted_l1_norm(beta, values)


def fit_mean_shift(
    d: Dataset,
    lam_beta: LambdaLike,
    lam_mu: LambdaLike,
    rho1: float = 1.0,
    rho2: float = 1.0,
    *,
    config: Optional[SolverConfig] = None,
) -> MeanShiftFit:
    """
    Modelo mean-shift: min ½‖y - Xβ - μ‖² + ρ1 J_λβ(β) + ρ2 J_λμ(μ).

    Equivale ao SLOPE na matriz aumentada [X I] com prox separável entre
    os blocos β e μ. Componentes não nulos de μ̂ indicam outliers.

    Args:
        d: Conjunto de dados (família gaussiana)
        lam_beta: Sequência de comprimento p
        lam_mu: Sequência de comprimento n
        rho1: Peso da penalidade de β
        rho2: Peso da penalidade de μ

    Returns:
        Solução conjunta
    """
    config = config or SolverConfig()
    if d.family != Family.GAUSSIAN:
        raise ValueError("O modelo mean-shift requer família gaussiana")
    if rho1 <= 0 or rho2 <= 0:
        raise ValueError("rho1 e rho2 devem ser positivos")
    lb = _lam_values(lam_beta) * rho1
    lm = _lam_values(lam_mu) * rho2
    if lb.size != d.p or lm.size != d.n:
        raise ValueError(f"Sequências devem ter comprimentos p={d.p} e n={d.n}")
    X, y, p = d.X, d.y, d.p

    def value_grad(x: np.ndarray) -> Tuple[float, np.ndarray]:
        resid = X @ x[:p] + x[p:] - y
        return 0.5 * float(resid @ resid), np.concatenate([X.T @ resid, resid])

    def prox(v: np.ndarray, step: float) -> np.ndarray:
        return np.concatenate([prox_sorted_l1(v[:p], step * lb), prox_sorted_l1(v[p:], step * lm)])

    def penalty(x: np.ndarray) -> float:
        return sorted_l1_norm(x[:p], lb) + sorted_l1_norm(x[p:], lm)

    def kkt(x: np.ndarray, grad: np.ndarray) -> float:
        return max(kkt_residual(x[:p], -grad[:p], lb), kkt_residual(x[p:], -grad[p:], lm))

    lipschitz = power_iteration(X, config.power_iterations) + 1.0
    x, iterations, converged, residual, _ = _fista(
        value_grad, prox, penalty, kkt, np.zeros(p + d.n), lipschitz, config
    )
    if not converged:
        logger.warning("Mean-shift não convergiu em %d iterações (resíduo KKT %.2e)", iterations, residual)
    return MeanShiftFit(
        beta=x[:p],
        mu=x[p:],
        objective=value_grad(x)[0] + penalty(x),
        kkt_residual=residual,
        iterations=iterations,
        converged=converged,
    )


@dataclass(frozen=True)
class PathPoint:
    """Um ponto do caminho SLOPE."""
    scale: float
    fit: SlopeFit


def slope_path(
    d: Dataset,
    lam: LambdaSequence,
    scales: Sequence[float],
    *,
    config: Optional[SolverConfig] = None,
) -> List[PathPoint]:
    """
    Caminho de soluções para c·λ, c decrescente, com warm starts.

    Args:
        d: Conjunto de dados
        lam: Sequência base (ex.: BH com q = 0.2)
        scales: Multiplicadores c (reordenados de forma decrescente)

    Returns:
        Pontos do caminho com número de não nulos e de clusters
    """
    config = config or SolverConfig()
    ordered = sorted({float(c) for c in scales}, reverse=True)
    points: List[PathPoint] = []
    beta, intercept = None, 0.0
    for c in ordered:
        fit = fit_slope(d, lam.scaled(c), config=config, warm_start=beta, warm_intercept=intercept)
        beta, intercept = fit.coefficients, fit.intercept
        points.append(PathPoint(scale=c, fit=fit))
        logger.debug("Caminho c=%.4g: %d não nulos, %d clusters", c, fit.n_nonzero, fit.n_clusters)
    return points
