"""
Ajuste de submodelos e avaliação de -2 log-verossimilhança e critérios.

Todo submodelo inclui intercepto não penalizado. A família gaussiana é
ajustada por mínimos quadrados; a binomial por IRLS (Newton).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Iterable, Optional, Tuple

import numpy as np
from scipy import stats
from scipy.special import expit

from ..core.config import SearchConfig
from ..core.dataset import Dataset
from ..core.entities import CriterionSpec, Family
from ..core.exceptions import ConvergenceError, RankDeficientError
from ..utils.logging_setup import get_logger
from ..utils.validation import validate_support
from .penalties import penalty

logger = get_logger(__name__)

FLAG_SEPARATION = "separation"
FLAG_RANK_DEFICIENT = "rank-deficient"
FLAG_PERFECT_FIT = "perfect-fit"

_SEPARATION_DEVIANCE = 1e-6
_SEPARATION_ETA = 30.0


@dataclass(frozen=True)
class SubmodelFit:
    """
    Ajuste de máxima verossimilhança de um submodelo com intercepto.

    Attributes:
        support: Índices das colunas
        coefficients: Coeficientes das colunas do suporte
        intercept: Intercepto
        neg2_loglik: -2 log L (forma perfilada, σ conhecido ou deviance)
        rss: Soma de quadrados residual (gaussiana) ou deviance (binomial)
        std_errors: Erros-padrão de Wald dos coeficientes
        p_values: p-valores de Wald (t para σ desconhecido, normal caso contrário)
        flags: Condições sinalizadas (separation, perfect-fit)
        iterations: Iterações do IRLS (0 para gaussiana)
    """
    support: Tuple[int, ...]
    coefficients: np.ndarray
    intercept: float
    neg2_loglik: float
    rss: float
    std_errors: np.ndarray
    p_values: np.ndarray
    flags: FrozenSet[str] = field(default_factory=frozenset)
    iterations: int = 0

    @property
    def k(self) -> int:
        return len(self.support)


def _design(d: Dataset, support: Tuple[int, ...]) -> np.ndarray:
    A = np.empty((d.n, len(support) + 1))
    A[:, 0] = 1.0
    if support:
        A[:, 1:] = d.X[:, list(support)]
    return A


def _check_size(d: Dataset, k: int) -> None:
    if k + 1 > d.n - 1:
        raise RankDeficientError(
            f"rank-deficient: modelo com {k} variáveis e intercepto excede n-1={d.n - 1}"
        )


def profile_neg2loglik(rss: float, n: int, sigma: Optional[float]) -> float:
    """n log(RSS/n) para σ desconhecido, RSS/σ² caso contrário."""
    if sigma is not None:
        return rss / sigma ** 2
    return n * math.log(rss / n)


def binomial_deviance(y: np.ndarray, eta: np.ndarray) -> float:
    """Deviance da regressão logística para o preditor linear eta."""
    return float(2.0 * np.sum(np.logaddexp(0.0, eta) - y * eta))


def _fit_gaussian(d: Dataset, support: Tuple[int, ...], sigma: Optional[float]) -> SubmodelFit:
    A = _design(d, support)
    coef, _, rank, _ = np.linalg.lstsq(A, d.y, rcond=None)
    if rank < A.shape[1]:
        names = [d.names[j] for j in support]
        raise RankDeficientError(f"rank-deficient: submatriz das colunas {names} não tem posto completo")
    resid = d.y - A @ coef
    rss = float(resid @ resid)
    flags = set()
    floor = d.n * np.finfo(float).tiny
    if rss <= floor:
        flags.add(FLAG_PERFECT_FIT)
        rss = floor

    dof = d.n - A.shape[1]
    R = np.linalg.qr(A, mode="r")
    R_inv = np.linalg.inv(R)
    unscaled = np.sqrt(np.sum(R_inv ** 2, axis=1))
    scale = sigma if sigma is not None else math.sqrt(rss / dof)
    se = unscaled * scale
    with np.errstate(divide="ignore", invalid="ignore"):
        tstat = coef / se
    if sigma is not None:
        pvals = 2.0 * stats.norm.sf(np.abs(tstat))
    else:
        pvals = 2.0 * stats.t.sf(np.abs(tstat), dof)
    return SubmodelFit(
        support=support,
        coefficients=coef[1:],
        intercept=float(coef[0]),
        neg2_loglik=profile_neg2loglik(rss, d.n, sigma),
        rss=rss,
        std_errors=se[1:],
        p_values=np.nan_to_num(pvals[1:], nan=1.0),
        flags=frozenset(flags),
    )


def _fit_binomial(d: Dataset, support: Tuple[int, ...], config: SearchConfig) -> SubmodelFit:
    A = _design(d, support)
    if np.linalg.matrix_rank(A) < A.shape[1]:
        names = [d.names[j] for j in support]
        raise RankDeficientError(f"rank-deficient: submatriz das colunas {names} não tem posto completo")
    y = d.y
    coef = np.zeros(A.shape[1])
    ybar = float(np.clip(y.mean(), 1e-6, 1.0 - 1e-6))
    coef[0] = math.log(ybar / (1.0 - ybar))
    eta = A @ coef
    deviance = binomial_deviance(y, eta)
    flags = set()
    converged = False
    iteration = 0
    for iteration in range(1, config.irls_max_iter + 1):
        mu = expit(eta)
        w = np.clip(mu * (1.0 - mu), 1e-10, None)
        z = eta + (y - mu) / w
        sw = np.sqrt(w)
        coef, *_ = np.linalg.lstsq(A * sw[:, None], z * sw, rcond=None)
        eta = A @ coef
        new_deviance = binomial_deviance(y, eta)
        if new_deviance < _SEPARATION_DEVIANCE or np.max(np.abs(eta)) > _SEPARATION_ETA:
            flags.add(FLAG_SEPARATION)
            deviance = new_deviance
            converged = True
            break
        if abs(new_deviance - deviance) <= config.irls_tol * (abs(new_deviance) + 0.1):
            deviance = new_deviance
            converged = True
            break
        deviance = new_deviance
    if not converged:
        raise ConvergenceError(
            f"IRLS não convergiu em {config.irls_max_iter} iterações para o suporte {list(support)}"
        )
    if FLAG_SEPARATION in flags:
        logger.warning("Separação completa detectada no suporte %s", list(support))

    mu = expit(eta)
    w = np.clip(mu * (1.0 - mu), 1e-10, None)
    info = A.T @ (A * w[:, None])
    try:
        se = np.sqrt(np.clip(np.diag(np.linalg.inv(info)), 0.0, None))
    except np.linalg.LinAlgError:
        se = np.full(A.shape[1], np.inf)
    with np.errstate(divide="ignore", invalid="ignore"):
        zstat = coef / se
    pvals = np.nan_to_num(2.0 * stats.norm.sf(np.abs(zstat)), nan=1.0)
    return SubmodelFit(
        support=support,
        coefficients=coef[1:],
        intercept=float(coef[0]),
        neg2_loglik=deviance,
        rss=deviance,
        std_errors=se[1:],
        p_values=pvals[1:],
        flags=frozenset(flags),
        iterations=iteration,
    )


def fit_submodel(
    d: Dataset,
    support: Iterable[int],
    *,
    sigma: Optional[float] = None,
    config: Optional[SearchConfig] = None,
) -> SubmodelFit:
    """
    Ajusta o submodelo (com intercepto) das colunas em support.

    Args:
        d: Conjunto de dados
        support: Índices das colunas
        sigma: σ conhecido (gaussiana); None usa a verossimilhança perfilada
        config: Configuração do IRLS

    Returns:
        Ajuste do submodelo

    Raises:
        RankDeficientError: Submatriz sem posto completo ou k > n-2
        ConvergenceError: IRLS não convergiu
    """
    support = validate_support(support, d.p)
    _check_size(d, len(support))
    if d.family == Family.BINOMIAL:
        return _fit_binomial(d, support, config or SearchConfig())
    return _fit_gaussian(d, support, sigma)


def neg2_loglik(
    d: Dataset,
    support: Iterable[int],
    coefficients: np.ndarray,
    intercept: float = 0.0,
    sigma: Optional[float] = None,
) -> float:
    """
    -2 log-verossimilhança dos coeficientes dados (constantes descartadas).

    Gaussiana com σ desconhecido retorna n log(RSS/n); com σ conhecido,
    RSS/σ²; binomial retorna a deviance.
    """
    support = validate_support(support, d.p)
    eta = np.full(d.n, float(intercept))
    if support:
        eta = eta + d.X[:, list(support)] @ np.asarray(coefficients, dtype=float)
    if d.family == Family.BINOMIAL:
        return binomial_deviance(d.y, eta)
    resid = d.y - eta
    rss = max(float(resid @ resid), d.n * np.finfo(float).tiny)
    return profile_neg2loglik(rss, d.n, sigma)


def evaluate_support(
    d: Dataset,
    spec: CriterionSpec,
    support: Iterable[int],
    config: Optional[SearchConfig] = None,
) -> Tuple[float, SubmodelFit]:
    """Valor do critério e ajuste do submodelo."""
    spec = spec.resolve(d.p)
    fit = fit_submodel(d, support, sigma=spec.sigma, config=config)
    return fit.neg2_loglik + penalty(spec, fit.k, d.n), fit


def criterion_value(
    d: Dataset,
    spec: CriterionSpec,
    support: Iterable[int],
    config: Optional[SearchConfig] = None,
) -> float:
    """
    -2 log L(β̂) + Pen(k) para o suporte.

    Raises:
        RankDeficientError, ConvergenceError: Propagados do ajuste
    """
    value, _ = evaluate_support(d, spec, support, config)
    return value


def multiple_r2(d: Dataset, fit: SubmodelFit) -> float:
    """R² múltiplo (gaussiana) ou pseudo-R² de deviance (binomial)."""
    if d.family == Family.BINOMIAL:
        ybar = float(np.clip(d.y.mean(), 1e-12, 1.0 - 1e-12))
        null = binomial_deviance(d.y, np.full(d.n, math.log(ybar / (1.0 - ybar))))
    else:
        centred = d.y - d.y.mean()
        null = float(centred @ centred)
    if null <= 0.0:
        return 0.0
    return 1.0 - fit.rss / null


def significance_flags(p_values: np.ndarray, p_total: int, alpha: float = 0.05) -> Dict[str, np.ndarray]:
    """
    Marcações de Benjamini-Hochberg e Bonferroni ajustadas a p_total testes.

    Returns:
        Dicionário com vetores booleanos "bh" e "bonferroni"
    """
    p_values = np.asarray(p_values, dtype=float)
    k = p_values.size
    bonferroni = p_values <= alpha / p_total
    bh = np.zeros(k, dtype=bool)
    if k:
        order = np.argsort(p_values, kind="stable")
        ranks = np.arange(1, k + 1)
        passing = np.flatnonzero(p_values[order] <= ranks * alpha / p_total)
        if passing.size:
            bh[order[: passing[-1] + 1]] = True
    return {"bh": bh, "bonferroni": bonferroni}


def submodel_diagnostics(d: Dataset, fit: SubmodelFit, p_total: int, alpha: float = 0.05) -> Dict[str, Any]:
    """Diagnósticos do modelo selecionado: R², p-valores e marcações."""
    flags = significance_flags(fit.p_values, p_total, alpha)
    return {
        "r2": multiple_r2(d, fit),
        "std_errors": fit.std_errors.tolist(),
        "p_values": fit.p_values.tolist(),
        "bh_significant": flags["bh"].tolist(),
        "bonferroni_significant": flags["bonferroni"].tolist(),
        "alpha": alpha,
        "p_total": p_total,
    }
