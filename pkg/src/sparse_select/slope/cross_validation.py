"""
Validação cruzada K-fold para grades de λ (LASSO) e de (c, q) (SLOPE).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from sklearn.model_selection import KFold, StratifiedKFold

from ..core.config import SolverConfig
from ..core.dataset import Dataset
from ..core.entities import CvErrorKind, CvMethod, CvSpec, Family
from ..core.exceptions import DataError, FitError
from ..criteria.likelihood import binomial_deviance
from ..utils.logging_setup import get_logger
from .lambdas import LambdaSequence, bh_sequence, make_lambda
from .solver import SlopeFit, fit_slope

logger = get_logger(__name__)

TuningPoint = Union[float, Tuple[float, float]]

DEFAULT_C_GRID = tuple(np.round(np.linspace(0.5, 3.0, 11), 6))
DEFAULT_Q_GRID = (0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6)


@dataclass(frozen=True)
class CvResult:
    """
    Resultado da validação cruzada.

    Attributes:
        method: lasso ou slope
        points: Pontos da grade (λ ou (c, q))
        fold_errors: Erros por ponto e fold (G × K); NaN marca falha
        mean_error: Erro médio por ponto (inf para pontos desqualificados)
        se: Erro-padrão do erro médio
        best_index: Índice do ponto selecionado
        refit: Ajuste no conjunto completo
        intercept: Intercepto do ajuste completo na escala dos dados
        failures: Número de ajustes (ponto, fold) que falharam
    """
    method: CvMethod
    points: Tuple[TuningPoint, ...]
    fold_errors: np.ndarray
    mean_error: np.ndarray
    se: np.ndarray
    best_index: int
    refit: SlopeFit
    intercept: float
    failures: int = 0

    @property
    def best_point(self) -> TuningPoint:
        return self.points[self.best_index]

    def table(self) -> pd.DataFrame:
        """Tabela (ponto, erro médio, se) para exportação."""
        if self.method == CvMethod.LASSO:
            frame = pd.DataFrame({"lambda": [float(p) for p in self.points]})
        else:
            frame = pd.DataFrame({"c": [p[0] for p in self.points], "q": [p[1] for p in self.points]})
        frame["mean_error"] = self.mean_error
        frame["se"] = self.se
        return frame


def fold_assignment(d: Dataset, folds: int, seed: int) -> List[Tuple[np.ndarray, np.ndarray]]:
    """
    Partição determinística em K folds (estratificada para binomial).

    Raises:
        DataError: Se n < 2K
    """
    if d.n < 2 * folds:
        raise DataError(f"Validação cruzada requer n >= 2K, recebido n={d.n}, K={folds}")
    if d.family == Family.BINOMIAL:
        splitter = StratifiedKFold(n_splits=folds, shuffle=True, random_state=seed % 2 ** 32)
        return list(splitter.split(d.X, d.y.astype(int)))
    splitter = KFold(n_splits=folds, shuffle=True, random_state=seed % 2 ** 32)
    return list(splitter.split(d.X))


def default_lasso_grid(d: Dataset, size: int = 100, ratio: float = 1e-3) -> List[float]:
    """Grade log-espaçada de ‖X'y‖∞ até ratio·‖X'y‖∞ (dados centralizados)."""
    Xc = d.X - d.X.mean(axis=0)
    lam_max = float(np.max(np.abs(Xc.T @ (d.y - d.y.mean()))))
    if lam_max <= 0:
        lam_max = 1.0
    return list(np.geomspace(lam_max, lam_max * ratio, size))


def default_slope_grid() -> List[Tuple[float, float]]:
    """c em [0.5, 3] × q em {0.05, ..., 0.6}."""
    return [(float(c), float(q)) for q in DEFAULT_Q_GRID for c in DEFAULT_C_GRID]


def _sequence(method: CvMethod, point: TuningPoint, p: int) -> LambdaSequence:
    if method == CvMethod.LASSO:
        return make_lambda("constant", p, value=float(point))
    c, q = point
    return LambdaSequence(bh_sequence(p, q, c), "bh", {"c": c, "q": q})


def _ordered(method: CvMethod, points: Sequence[TuningPoint]) -> List[int]:
    # ordem de warm start: do ponto mais penalizado ao menos penalizado
    if method == CvMethod.LASSO:
        return sorted(range(len(points)), key=lambda i: -float(points[i]))
    return sorted(range(len(points)), key=lambda i: (points[i][1], -points[i][0]))


class _Prepared:
    """Dados de treino centralizados e predição no conjunto de teste."""

    def __init__(self, d: Dataset) -> None:
        self.family = d.family
        self.x_mean = d.X.mean(axis=0)
        self.y_mean = float(d.y.mean()) if d.family == Family.GAUSSIAN else 0.0
        self.data = d.with_design(d.X - self.x_mean, d.names)
        if d.family == Family.GAUSSIAN:
            self.data = Dataset(y=d.y - self.y_mean, X=self.data.X, names=d.names, family=d.family)

    def linear_predictor(self, fit: SlopeFit, X: np.ndarray) -> np.ndarray:
        return self.y_mean + fit.intercept + (X - self.x_mean) @ fit.coefficients

    def intercept(self, fit: SlopeFit) -> float:
        return float(self.y_mean + fit.intercept - self.x_mean @ fit.coefficients)


def prediction_error(y: np.ndarray, eta: np.ndarray, kind: CvErrorKind) -> float:
    """Erro quadrático médio ou deviance média por observação."""
    if kind == CvErrorKind.DEVIANCE:
        return binomial_deviance(y, eta) / y.size
    return float(np.mean((y - eta) ** 2))


def _fold_path(
    d: Dataset,
    train: np.ndarray,
    test: np.ndarray,
    method: CvMethod,
    points: Sequence[TuningPoint],
    order: Sequence[int],
    error: CvErrorKind,
    config: SolverConfig,
) -> np.ndarray:
    prepared = _Prepared(Dataset(y=d.y[train], X=d.X[train], names=d.names, family=d.family))
    X_test, y_test = d.X[test], d.y[test]
    errors = np.full(len(points), np.nan)
    beta, intercept = None, 0.0
    for i in order:
        try:
            fit = fit_slope(prepared.data, _sequence(method, points[i], d.p), config=config,
                            warm_start=beta, warm_intercept=intercept)
        except (FitError, FloatingPointError, ValueError) as err:
            logger.warning("Falha no ajuste do ponto %s: %s", points[i], err)
            continue
        beta, intercept = fit.coefficients, fit.intercept
        errors[i] = prediction_error(y_test, prepared.linear_predictor(fit, X_test), error)
    return errors


def cv_select(
    d: Dataset,
    spec: CvSpec,
    method: Union[CvMethod, str],
    *,
    config: Optional[SolverConfig] = None,
    n_jobs: int = 1,
) -> CvResult:
    """
    Seleciona o ponto da grade de menor erro médio de predição.

    Args:
        d: Conjunto de dados
        spec: Especificação (folds, grade, erro, semente, regra de 1 se)
        method: lasso ou slope
        config: Configuração do solver
        n_jobs: Paralelismo entre folds

    Returns:
        Resultado com tabela de erros e reajuste no conjunto completo

    Raises:
        DataError: n < 2K
        FitError: Todos os pontos da grade desqualificados
    """
    method = CvMethod(method)
    config = config or SolverConfig()
    error = spec.error or (CvErrorKind.DEVIANCE if d.family == Family.BINOMIAL else CvErrorKind.SQUARED)
    if spec.grid is not None:
        points: List[TuningPoint] = [
            float(p) if method == CvMethod.LASSO else (float(p[0]), float(p[1])) for p in spec.grid
        ]
    else:
        points = default_lasso_grid(d, spec.grid_size) if method == CvMethod.LASSO else default_slope_grid()
    order = _ordered(method, points)
    splits = fold_assignment(d, spec.folds, spec.seed)

    per_fold = Parallel(n_jobs=n_jobs, prefer="threads")(
        delayed(_fold_path)(d, train, test, method, points, order, error, config) for train, test in splits
    )
    fold_errors = np.column_stack(per_fold)
    failed = np.isnan(fold_errors)
    qualified = ~failed.any(axis=1)
    mean_error = np.full(len(points), np.inf)
    se = np.full(len(points), np.nan)
    mean_error[qualified] = fold_errors[qualified].mean(axis=1)
    se[qualified] = fold_errors[qualified].std(axis=1, ddof=1) / np.sqrt(spec.folds)
    if not np.any(qualified):
        raise FitError("Todos os pontos da grade falharam na validação cruzada")

    best = int(np.argmin(mean_error))
    if spec.one_se:
        limit = mean_error[best] + se[best]
        eligible = [i for i in range(len(points)) if qualified[i] and mean_error[i] <= limit]
        best = max(eligible, key=lambda i: (float(_sequence(method, points[i], d.p).values.sum()), -i))

    prepared = _Prepared(d)
    refit = fit_slope(prepared.data, _sequence(method, points[best], d.p), config=config)
    logger.info(
        "CV %s: %d pontos, %d desqualificados, melhor %s (erro %.4g)",
        method.value, len(points), int((~qualified).sum()), points[best], mean_error[best],
    )
    return CvResult(
        method=method,
        points=tuple(points),
        fold_errors=fold_errors,
        mean_error=mean_error,
        se=se,
        best_index=best,
        refit=refit,
        intercept=prepared.intercept(refit),
        failures=int(failed.sum()),
    )


def summarize(result: CvResult) -> Dict[str, Any]:
    """Resumo serializável do resultado da validação cruzada."""
    best = result.best_point
    return {
        "method": result.method.value,
        "best_point": list(best) if isinstance(best, tuple) else best,
        "best_error": float(result.mean_error[result.best_index]),
        "best_se": float(result.se[result.best_index]),
        "n_points": len(result.points),
        "failures": result.failures,
        "nonzero": result.refit.n_nonzero,
        "clusters": result.refit.n_clusters,
    }
