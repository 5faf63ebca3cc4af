"""
Busca heurística de suportes que minimizam um critério de informação.

Estágios disponíveis: triagem marginal, forward, backward, stepwise e
forward com número limitado de passos, combinados em planos por run_plan.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np
from joblib import Parallel, delayed
from scipy import linalg, stats

from ..core.config import SearchConfig
from ..core.dataset import Dataset
from ..core.entities import CriterionSpec, Family, SearchPlan, StageKind
from ..core.exceptions import ConvergenceError, FitError
from ..criteria.likelihood import (
    FLAG_RANK_DEFICIENT,
    FLAG_SEPARATION,
    evaluate_support,
    fit_submodel,
    submodel_diagnostics,
)
from ..criteria.penalties import penalty
from ..utils.logging_setup import get_logger
from ..utils.validation import validate_probability, validate_support

logger = get_logger(__name__)

ACTION_ADD = "add"
ACTION_DROP = "drop"
ACTION_STAGE = "stage"

_COLLINEAR_TOL = 1e-10


def improvement_tolerance(current: float) -> float:
    """Diminuição mínima do critério para aceitar um movimento."""
    return 1e-9 * max(1.0, abs(current))


def k_cap(n: int, p: int, override: Optional[int] = None) -> int:
    """
    Tamanho máximo do modelo: floor(min(p/4, n/2)), limitado a n-2.

    Args:
        n: Tamanho amostral
        p: Número de colunas
        override: Valor explícito (ainda limitado a n-2 e p)
    """
    cap = override if override is not None else math.floor(min(p / 4.0, n / 2.0))
    return max(0, min(int(cap), n - 2, p))


@dataclass(frozen=True)
class TraceEntry:
    """Um movimento aceito (ou fronteira de estágio) da busca."""
    action: str
    index: Optional[int]
    value: float
    stage: str


@dataclass(frozen=True)
class FitResult:
    """
    Resultado de uma busca.

    Attributes:
        support: Índices selecionados (ordenados)
        coefficients: Coeficientes do submodelo reajustado, alinhados a support
        intercept: Intercepto do submodelo
        criterion_value: Critério final recalculado no suporte
        criterion: Critério usado no valor final
        trace: Movimentos e fronteiras de estágio
        flags: Condições sinalizadas durante a busca
        names: Nomes das colunas selecionadas
        diagnostics: R², p-valores de Wald e marcações BH/Bonferroni
    """
    support: Tuple[int, ...]
    coefficients: np.ndarray
    intercept: float
    criterion_value: float
    criterion: CriterionSpec
    trace: Tuple[TraceEntry, ...] = ()
    flags: FrozenSet[str] = frozenset()
    names: Tuple[str, ...] = ()
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    def coefficient_vector(self, p: int) -> np.ndarray:
        """Coeficientes expandidos para as p colunas."""
        beta = np.zeros(p)
        if self.support:
            beta[list(self.support)] = self.coefficients
        return beta

    def moves(self) -> Tuple[TraceEntry, ...]:
        """Apenas os movimentos add/drop do traço."""
        return tuple(entry for entry in self.trace if entry.action != ACTION_STAGE)


# =============================================================================
# Pontuação de candidatos
# =============================================================================

class _GaussianScorer:
    """Atualiza RSS por projeção na fatoração QR de [1, X_S]."""

    def __init__(self, d: Dataset, sigma: Optional[float]) -> None:
        self.d = d
        self.sigma = sigma
        self.floor = d.n * np.finfo(float).tiny

    def refresh(self, support: Tuple[int, ...]) -> None:
        d = self.d
        A = np.empty((d.n, len(support) + 1))
        A[:, 0] = 1.0
        if support:
            A[:, 1:] = d.X[:, list(support)]
        self.Q, self.R = np.linalg.qr(A)
        qty = self.Q.T @ d.y
        self.coef = linalg.solve_triangular(self.R, qty)
        self.resid = d.y - self.Q @ qty
        self.rss = float(self.resid @ self.resid)

    def add(self, candidates: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        Xc = self.d.X[:, candidates]
        P = Xc - self.Q @ (self.Q.T @ Xc)
        norms = np.sum(P ** 2, axis=0)
        collinear = norms <= _COLLINEAR_TOL * np.maximum(np.sum(Xc ** 2, axis=0), 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            rss = self.rss - (P.T @ self.resid) ** 2 / norms
        rss = np.maximum(rss, self.floor)
        rss[collinear] = np.nan
        return rss, collinear

    def drop(self) -> np.ndarray:
        R_inv = linalg.solve_triangular(self.R, np.eye(self.R.shape[0]))
        diag = np.sum(R_inv ** 2, axis=1)[1:]
        return self.rss + self.coef[1:] ** 2 / diag

    def value(self, rss: np.ndarray, spec: CriterionSpec, k: int) -> np.ndarray:
        out = np.full(rss.shape, np.inf)
        ok = np.isfinite(rss)
        if self.sigma is not None:
            neg2 = rss[ok] / self.sigma ** 2
        else:
            neg2 = self.d.n * np.log(rss[ok] / self.d.n)
        out[ok] = neg2 + penalty(spec, k, self.d.n)
        return out


def _score_support(d: Dataset, spec: CriterionSpec, support: Tuple[int, ...], config: SearchConfig) -> Tuple[float, Optional[str]]:
    try:
        value, fit = evaluate_support(d, spec, support, config)
    except FitError as error:
        flag = FLAG_RANK_DEFICIENT if not isinstance(error, ConvergenceError) else "non-convergence"
        return math.inf, flag
    return value, (FLAG_SEPARATION if FLAG_SEPARATION in fit.flags else None)


class _Searcher:
    """Estado de uma busca gulosa para um critério."""

    def __init__(
        self,
        d: Dataset,
        spec: CriterionSpec,
        config: SearchConfig,
        cap: int,
        pool: Sequence[int],
        stage: str,
    ) -> None:
        self.d = d
        self.spec = spec.resolve(d.p)
        self.config = config
        self.cap = cap
        self.pool = tuple(sorted(set(int(j) for j in pool)))
        self.stage = stage
        self.flags: Set[str] = set()
        self.gaussian = _GaussianScorer(d, self.spec.sigma) if d.family == Family.GAUSSIAN else None

    def _refit_values(self, supports: List[Tuple[int, ...]]) -> np.ndarray:
        if self.config.n_jobs != 1 and len(supports) > 1:
            results = Parallel(n_jobs=self.config.n_jobs, prefer="threads")(
                delayed(_score_support)(self.d, self.spec, s, self.config) for s in supports
            )
        else:
            results = [_score_support(self.d, self.spec, s, self.config) for s in supports]
        for _, flag in results:
            if flag:
                self.flags.add(flag)
        return np.array([value for value, _ in results], dtype=float)

    def _best_add(self, support: Tuple[int, ...]) -> Tuple[float, Optional[int]]:
        if len(support) >= self.cap or len(support) + 2 > self.d.n - 1:
            return math.inf, None
        members = set(support)
        candidates = np.array([j for j in self.pool if j not in members], dtype=int)
        if candidates.size == 0:
            return math.inf, None
        if self.gaussian is not None:
            rss, collinear = self.gaussian.add(candidates)
            if np.any(collinear):
                self.flags.add(FLAG_RANK_DEFICIENT)
                logger.debug("Candidatos colineares ignorados: %s", candidates[collinear].tolist())
            values = self.gaussian.value(rss, self.spec, len(support) + 1)
        else:
            values = self._refit_values([tuple(sorted(members | {int(j)})) for j in candidates])
        best = int(np.argmin(values))
        return float(values[best]), int(candidates[best])

    def _best_drop(self, support: Tuple[int, ...]) -> Tuple[float, Optional[int]]:
        if not support:
            return math.inf, None
        if self.gaussian is not None:
            values = self.gaussian.value(self.gaussian.drop(), self.spec, len(support) - 1)
        else:
            values = self._refit_values([tuple(j for j in support if j != drop) for drop in support])
        best = int(np.argmin(values))
        return float(values[best]), support[best]

    def run(
        self,
        start: Tuple[int, ...],
        *,
        allow_add: bool,
        allow_drop: bool,
        max_steps: Optional[int] = None,
    ) -> Tuple[Tuple[int, ...], float, List[TraceEntry]]:
        support = tuple(sorted(start))
        current, fit = evaluate_support(self.d, self.spec, support, self.config)
        self.flags.update(fit.flags)
        entries = [TraceEntry(ACTION_STAGE, None, current, self.stage)]
        steps = 0
        while max_steps is None or steps < max_steps:
            if self.gaussian is not None:
                self.gaussian.refresh(support)
            add_value, add_index = self._best_add(support) if allow_add else (math.inf, None)
            drop_value, drop_index = self._best_drop(support) if allow_drop else (math.inf, None)
            # empate entre adicionar e remover favorece a remoção
            if drop_index is not None and drop_value <= add_value:
                action, index, proposed = ACTION_DROP, drop_index, drop_value
            elif add_index is not None:
                action, index, proposed = ACTION_ADD, add_index, add_value
            else:
                break
            tol = improvement_tolerance(current)
            if not proposed < current - tol:
                break
            if action == ACTION_ADD:
                candidate = tuple(sorted(support + (index,)))
            else:
                candidate = tuple(j for j in support if j != index)
            try:
                value, fit = evaluate_support(self.d, self.spec, candidate, self.config)
            except FitError as error:
                logger.warning("Movimento %s(%s) descartado: %s", action, self.d.names[index], error)
                self.flags.add(FLAG_RANK_DEFICIENT)
                break
            if not value < current - tol:
                break
            self.flags.update(fit.flags)
            support, current = candidate, value
            entries.append(TraceEntry(action, index, value, self.stage))
            steps += 1
            logger.debug("%s: %s %s -> %.6f", self.stage, action, self.d.names[index], value)
        return support, current, entries


# =============================================================================
# Triagem marginal
# =============================================================================

def marginal_p_values(d: Dataset, config: Optional[SearchConfig] = None) -> np.ndarray:
    """
    p-valores marginais de cada coluna (modelo com intercepto e uma variável).

    Teste t para a família gaussiana e Wald z para a binomial. Colunas
    constantes recebem p-valor 1; separação completa recebe p-valor 0.
    """
    config = config or SearchConfig()
    n = d.n
    Xc = d.X - d.X.mean(axis=0)
    sxx = np.sum(Xc ** 2, axis=0)
    constant = sxx <= 1e-12 * np.maximum(np.sum(d.X ** 2, axis=0), 1.0)
    pvals = np.ones(d.p)
    if d.family == Family.GAUSSIAN:
        yc = d.y - d.y.mean()
        syy = float(yc @ yc)
        if syy <= 0.0:
            return pvals
        with np.errstate(divide="ignore", invalid="ignore"):
            r2 = (Xc.T @ yc) ** 2 / (sxx * syy)
            r2 = np.clip(r2, 0.0, 1.0)
            t2 = (n - 2) * r2 / (1.0 - r2)
        tstat = np.sqrt(np.where(np.isnan(t2), 0.0, t2))
        pvals = 2.0 * stats.t.sf(tstat, n - 2)
        pvals[constant] = 1.0
        return pvals
    for j in np.flatnonzero(~constant):
        try:
            fit = fit_submodel(d, (int(j),), config=config)
        except FitError as error:
            logger.debug("Triagem: coluna %s sem ajuste (%s)", d.names[j], error)
            continue
        pvals[j] = 0.0 if FLAG_SEPARATION in fit.flags else float(fit.p_values[0])
    return pvals


def marginal_screen(d: Dataset, threshold: float, config: Optional[SearchConfig] = None) -> Tuple[int, ...]:
    """
    Mantém as colunas com p-valor marginal <= threshold.

    Args:
        d: Conjunto de dados
        threshold: Limiar em (0, 1]

    Returns:
        Índices sobreviventes, ordenados

    Examples:
        Com threshold=1 todas as colunas sobrevivem.
    """
    threshold = validate_probability(threshold, "threshold", allow_one=True)
    pvals = marginal_p_values(d, config)
    survivors = tuple(int(j) for j in np.flatnonzero(pvals <= threshold))
    logger.info("Triagem marginal (%.3g): %d de %d colunas mantidas", threshold, len(survivors), d.p)
    return survivors


# =============================================================================
# Estágios gulosos
# =============================================================================

def _build_result(
    d: Dataset,
    spec: CriterionSpec,
    support: Tuple[int, ...],
    trace: Sequence[TraceEntry],
    flags: Iterable[str],
    config: SearchConfig,
) -> FitResult:
    spec = spec.resolve(d.p)
    value, fit = evaluate_support(d, spec, support, config)
    return FitResult(
        support=fit.support,
        coefficients=fit.coefficients,
        intercept=fit.intercept,
        criterion_value=value,
        criterion=spec,
        trace=tuple(trace),
        flags=frozenset(flags) | fit.flags,
        names=tuple(d.names[j] for j in fit.support),
        diagnostics=submodel_diagnostics(d, fit, spec.p_total or d.p),
    )


def _run_stage(
    d: Dataset,
    spec: CriterionSpec,
    start: Iterable[int],
    *,
    allow_add: bool,
    allow_drop: bool,
    label: str,
    candidates: Optional[Iterable[int]],
    config: Optional[SearchConfig],
    max_size: Optional[int],
    max_steps: Optional[int] = None,
) -> FitResult:
    config = config or SearchConfig()
    start = validate_support(start, d.p)
    pool = tuple(range(d.p)) if candidates is None else validate_support(candidates, d.p)
    cap = k_cap(d.n, d.p, max_size if max_size is not None else config.max_size)
    searcher = _Searcher(d, spec, config, cap, pool, label)
    support, _, entries = searcher.run(start, allow_add=allow_add, allow_drop=allow_drop, max_steps=max_steps)
    return _build_result(d, searcher.spec, support, entries, searcher.flags, config)


def forward(
    d: Dataset,
    spec: CriterionSpec,
    start: Iterable[int] = (),
    *,
    candidates: Optional[Iterable[int]] = None,
    config: Optional[SearchConfig] = None,
    max_size: Optional[int] = None,
) -> FitResult:
    """
    Seleção forward: adiciona a variável de maior redução do critério.

    Para quando nenhuma adição reduz o critério ou o limite de tamanho
    (floor(min(p/4, n/2)), ou max_size) é atingido. Empates favorecem o
    menor índice de coluna.

    Args:
        d: Conjunto de dados
        spec: Critério
        start: Suporte inicial
        candidates: Colunas elegíveis (padrão: todas)
        config: Configuração da busca
        max_size: Limite de tamanho explícito

    Returns:
        Resultado com traço de adições
    """
    return _run_stage(d, spec, start, allow_add=True, allow_drop=False, label=f"forward({spec.label})",
                      candidates=candidates, config=config, max_size=max_size)


def backward(
    d: Dataset,
    spec: CriterionSpec,
    start: Iterable[int],
    *,
    config: Optional[SearchConfig] = None,
) -> FitResult:
    """Eliminação backward: remove a variável de maior redução do critério."""
    return _run_stage(d, spec, start, allow_add=False, allow_drop=True, label=f"backward({spec.label})",
                      candidates=None, config=config, max_size=None)


def stepwise(
    d: Dataset,
    spec: CriterionSpec,
    start: Iterable[int] = (),
    *,
    candidates: Optional[Iterable[int]] = None,
    config: Optional[SearchConfig] = None,
    max_size: Optional[int] = None,
) -> FitResult:
    """
    Busca stepwise: aplica o melhor movimento único (adicionar ou remover)
    até que nenhum reduza o critério.
    """
    return _run_stage(d, spec, start, allow_add=True, allow_drop=True, label=f"stepwise({spec.label})",
                      candidates=candidates, config=config, max_size=max_size)


def run_plan(
    d: Dataset,
    plan: SearchPlan,
    *,
    start: Iterable[int] = (),
    config: Optional[SearchConfig] = None,
    max_size: Optional[int] = None,
) -> FitResult:
    """
    Executa um plano de busca, encadeando o suporte pelos estágios.

    A triagem restringe as colunas elegíveis dos estágios seguintes. O
    traço registra uma entrada "stage" no início de cada estágio. O
    resultado é o melhor suporte, no critério do último estágio, entre as
    saídas dos estágios que usam esse mesmo critério.

    Args:
        d: Conjunto de dados
        plan: Plano de busca
        start: Suporte inicial
        config: Configuração da busca
        max_size: Limite de tamanho explícito

    Returns:
        Resultado final
    """
    config = config or SearchConfig()
    support = validate_support(start, d.p)
    pool: Tuple[int, ...] = tuple(range(d.p))
    cap = k_cap(d.n, d.p, max_size if max_size is not None else config.max_size)
    trace: List[TraceEntry] = []
    flags: Set[str] = set()
    final_spec = plan.stages[-1].criterion
    if final_spec is None:
        raise ValueError("O último estágio do plano deve ter um critério")
    outputs: List[Tuple[float, Tuple[int, ...]]] = []

    for stage in plan.stages:
        if stage.kind == StageKind.SCREEN:
            assert stage.threshold is not None
            survivors = marginal_screen(d, stage.threshold, config)
            pool = tuple(sorted(set(survivors) | set(support)))
            trace.append(TraceEntry(ACTION_STAGE, None, math.nan, stage.label))
            continue
        assert stage.criterion is not None
        searcher = _Searcher(d, stage.criterion, config, cap, pool, stage.label)
        allow_add = stage.kind in (StageKind.FORWARD, StageKind.STEPWISE, StageKind.FORWARD_STEPS)
        allow_drop = stage.kind in (StageKind.BACKWARD, StageKind.STEPWISE)
        max_steps = stage.count if stage.kind == StageKind.FORWARD_STEPS else None
        support, value, entries = searcher.run(support, allow_add=allow_add, allow_drop=allow_drop, max_steps=max_steps)
        trace.extend(entries)
        flags |= searcher.flags
        logger.info("Estágio %s: %d variáveis, critério %.4f", stage.label, len(support), value)
        if stage.criterion == final_spec:
            outputs.append((value, support))

    best_value, best_support = outputs[0]
    for value, candidate in outputs[1:]:
        if value <= best_value:
            best_value, best_support = value, candidate
    return _build_result(d, final_spec, best_support, trace, flags, config)
