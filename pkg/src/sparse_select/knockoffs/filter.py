"""
Filtro knockoff model-X gaussiano (construção equicorrelacionada),
estatísticas W de troca de sinal via LASSO com validação cruzada e o
limiar knockoff+ que controla o FDR.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
from scipy import linalg

from ..core.config import SolverConfig
from ..core.dataset import LANE_METHOD, Dataset, RngStream
from ..core.entities import CvMethod, CvSpec
from ..core.exceptions import DataError
from ..slope.cross_validation import cv_select
from ..utils.logging_setup import get_logger
from ..utils.validation import validate_probability

logger = get_logger(__name__)

_PSD_TOL = 1e-10


@dataclass(frozen=True)
class KnockoffResult:
    """
    Resultado do filtro knockoff.

    Attributes:
        knockoffs: Matriz X̃ (n × p)
        W: Estatísticas antissimétricas (p,)
        threshold: Limiar t̂ (inf se nada for selecionado)
        selected: Índices {j : W_j >= t̂}
        q: FDR alvo
        s: Vetor s da construção
        coefficients: Coeficientes LASSO das colunas originais
    """
    knockoffs: np.ndarray
    W: np.ndarray
    threshold: float
    selected: Tuple[int, ...]
    q: float
    s: np.ndarray
    coefficients: Optional[np.ndarray] = None


def equicorrelated_s(sigma: np.ndarray) -> np.ndarray:
    """s_j = min(λ_min(Σ), min_j Σ_jj) para todo j."""
    sigma = np.asarray(sigma, dtype=float)
    smallest = float(linalg.eigvalsh(sigma, subset_by_index=[0, 0])[0])
    value = max(0.0, min(smallest, float(np.min(np.diag(sigma)))))
    return np.full(sigma.shape[0], value)


def make_knockoffs(
    X: np.ndarray,
    sigma: np.ndarray,
    s: Optional[Union[float, np.ndarray]] = None,
    rng: Union[RngStream, np.random.Generator, None] = None,
) -> np.ndarray:
    """
    Sorteia knockoffs gaussianos condicionalmente a X.

    X̃ | X ~ N(X(I - Σ⁻¹D), 2D - DΣ⁻¹D), com D = diag(s).

    Args:
        X: Desenho (n × p) com linhas N(0, Σ)
        sigma: Covariância conhecida Σ
        s: Vetor (ou escalar) s >= 0; None usa a construção equicorrelacionada
        rng: Fluxo (canal de método) ou gerador; padrão RngStream(0)

    Returns:
        Matriz de knockoffs

    Raises:
        DataError: Σ não positiva definida ou 2Σ - diag(s) não PSD
    """
    X = np.asarray(X, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    p = X.shape[1]
    if sigma.shape != (p, p):
        raise DataError(f"Σ deve ser {p}×{p}, recebido {sigma.shape}")
    s_vec = equicorrelated_s(sigma) if s is None else np.broadcast_to(np.asarray(s, dtype=float), (p,)).copy()
    if np.any(s_vec < 0):
        raise DataError("s deve ser não negativo")
    if not np.any(s_vec > 0):
        return X.copy()

    D = np.diag(s_vec)
    if float(linalg.eigvalsh(2.0 * sigma - D, subset_by_index=[0, 0])[0]) < -_PSD_TOL:
        raise DataError("psd-violation: 2Σ - diag(s) não é semidefinida positiva")
    try:
        factor = linalg.cho_factor(sigma)
    except linalg.LinAlgError as error:
        raise DataError("non-positive-definite: Σ não é positiva definida") from error
    sigma_inv_d = linalg.cho_solve(factor, D)
    mean = X - X @ sigma_inv_d
    cond_cov = 2.0 * D - D @ sigma_inv_d
    cond_cov = 0.5 * (cond_cov + cond_cov.T)
    eigval, eigvec = linalg.eigh(cond_cov)
    root = eigvec * np.sqrt(np.clip(eigval, 0.0, None))

    if rng is None:
        rng = RngStream(0)
    if isinstance(rng, RngStream):
        generator = rng.generator(LANE_METHOD)
    else:
        generator = rng
    noise = generator.standard_normal(X.shape) @ root.T
    return mean + noise


def _augmented_lasso(
    d: Dataset,
    knockoffs: np.ndarray,
    cv: Optional[CvSpec],
    config: Optional[SolverConfig],
) -> np.ndarray:
    if knockoffs.shape != d.X.shape:
        raise DataError(f"Knockoffs devem ter forma {d.X.shape}, recebido {knockoffs.shape}")
    names = list(d.names) + [f"{name}~" for name in d.names]
    augmented = d.with_design(np.hstack([d.X, knockoffs]), names)
    result = cv_select(augmented, cv or CvSpec(), CvMethod.LASSO, config=config)
    return result.refit.coefficients


def _signed_max(beta: np.ndarray, p: int) -> np.ndarray:
    magnitude = np.abs(beta)
    return magnitude[:p] - magnitude[p:]


def knockoff_stats(
    d: Dataset,
    knockoffs: np.ndarray,
    cv: Optional[CvSpec] = None,
    *,
    config: Optional[SolverConfig] = None,
) -> np.ndarray:
    """
    W_j = |β̂_j| - |β̂_{j+p}| do LASSO com λ escolhido por validação cruzada em [X, X̃].

    Trocar as colunas j e j+p troca o sinal de W_j.
    """
    return _signed_max(_augmented_lasso(d, knockoffs, cv, config), d.p)


def knockoff_threshold(W: np.ndarray, q: float) -> Tuple[float, Tuple[int, ...]]:
    """
    Limiar knockoff+: t̂ = min{t > 0 : (1 + #{W_j <= -t}) / #{W_j >= t} <= q}.

    Os candidatos são {|W_j| : W_j != 0}. Sem candidato válido, t̂ = inf e
    nenhuma variável é selecionada.

    Examples:
        >>> knockoff_threshold(np.array([3.0, 2.0, 1.0, -0.5]), 0.5)
        (1.0, (0, 1, 2))
    """
    q = validate_probability(q, "q", allow_one=True)
    W = np.asarray(W, dtype=float)
    candidates = np.unique(np.abs(W[W != 0]))
    for t in candidates:
        positives = int(np.sum(W >= t))
        if positives == 0:
            continue
        if (1 + int(np.sum(W <= -t))) / positives <= q:
            selected = tuple(int(j) for j in np.flatnonzero(W >= t))
            return float(t), selected
    return math.inf, ()


def knockoff_filter(
    d: Dataset,
    sigma: np.ndarray,
    q: float = 0.2,
    *,
    rng: Union[RngStream, np.random.Generator, None] = None,
    s: Optional[Union[float, np.ndarray]] = None,
    cv: Optional[CvSpec] = None,
    config: Optional[SolverConfig] = None,
) -> KnockoffResult:
    """
    Filtro completo: knockoffs, estatísticas W e limiar.

    Args:
        d: Conjunto de dados
        sigma: Covariância conhecida das linhas de X
        q: FDR alvo
        rng: Fonte de aleatoriedade dos knockoffs (padrão: RngStream(0))
        s: Vetor s (padrão: equicorrelacionado)
        cv: Especificação da validação cruzada do LASSO

    Returns:
        Resultado do filtro
    """
    q = validate_probability(q, "q")
    sigma = np.asarray(sigma, dtype=float)
    s_vec = equicorrelated_s(sigma) if s is None else np.broadcast_to(np.asarray(s, dtype=float), (d.p,)).copy()
    X_tilde = make_knockoffs(d.X, sigma, s_vec, rng)
    beta = _augmented_lasso(d, X_tilde, cv, config)
    W = _signed_max(beta, d.p)
    threshold, selected = knockoff_threshold(W, q)
    logger.info("Knockoffs: %d selecionadas (t=%.4g, q=%.2f)", len(selected), threshold, q)
    return KnockoffResult(
        knockoffs=X_tilde, W=W, threshold=threshold, selected=selected, q=q, s=s_vec,
        coefficients=beta[: d.p].copy(),
    )
