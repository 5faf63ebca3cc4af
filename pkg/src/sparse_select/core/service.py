"""
Fluxos de trabalho de alto nível sobre arquivos CSV.

A classe SelectionService encadeia leitura, padronização, ajuste e
formatação dos resultados. É usada pela CLI e pelo servidor MCP.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
from sklearn.covariance import LedoitWolf

from ..criteria.likelihood import criterion_value, fit_submodel
from ..knockoffs.filter import KnockoffResult, knockoff_filter
from ..search.stepwise import FitResult, backward, run_plan
from ..simulation.harness import run_configured
from ..simulation.metrics import MetricsReport
from ..simulation.scenarios import builtin_scenarios, resolve_scenario
from ..slope.cross_validation import CvResult, cv_select, summarize
from ..slope.lambdas import LambdaSequence, make_lambda
from ..slope.solver import PathPoint, SlopeFit, fit_slope, slope_path
from ..utils.formatting import fit_result_dict, format_selection_summary, knockoff_dict, slope_fit_dict, to_builtin
from ..utils.logging_setup import get_logger
from ..utils.serialization import read_lambda, read_selection, read_table
from .config import SearchConfig, SimulationConfig, SolverConfig
from .dataset import Dataset, RngStream, load_csv, standardize
from .entities import CriterionSpec, CvMethod, CvSpec, Family, ScalingMode, SearchPlan
from .exceptions import DataError

logger = get_logger(__name__)

PathLike = Union[str, Path]

SLOPE_RULES = ("bh", "inflated", "heuristic", "second-order", "explicit")
LASSO_RULES = ("constant", "bonferroni")


@dataclass(frozen=True)
class SlopeRun:
    """
    Resultado de um ajuste SLOPE/LASSO.

    Attributes:
        payload: Resumo serializável (escala original)
        fit: Ajuste na escala padronizada
        lam: Sequência usada no ajuste final
        cv: Resultado da validação cruzada (se usada)
        path: Pontos do caminho (se pedido)
    """
    payload: Dict[str, Any]
    fit: SlopeFit
    lam: LambdaSequence
    cv: Optional[CvResult] = None
    path: List[PathPoint] = field(default_factory=list)


def estimate_sigma(d: Dataset) -> float:
    """
    σ pelo ajuste de mínimos quadrados completo.

    Raises:
        DataError: Se n <= p + 1
    """
    if d.n <= d.p + 1:
        raise DataError(f"σ não pode ser estimado com n={d.n} <= p+1={d.p + 1}; informe sigma")
    fit = fit_submodel(d, tuple(range(d.p)))
    return float(np.sqrt(fit.rss / (d.n - d.p - 1)))


class SelectionService:
    """
    Serviço de seleção de variáveis.

    Attributes:
        search_config: Configuração da busca por critério
        solver_config: Configuração do solver SLOPE
        simulation_config: Configuração do harness
    """

    def __init__(
        self,
        search_config: Optional[SearchConfig] = None,
        solver_config: Optional[SolverConfig] = None,
        simulation_config: Optional[SimulationConfig] = None,
    ) -> None:
        self.search_config = search_config or SearchConfig()
        self.solver_config = solver_config or SolverConfig()
        self.simulation_config = simulation_config or SimulationConfig()

    @classmethod
    def from_env(cls) -> "SelectionService":
        return cls(SearchConfig.from_env(), SolverConfig.from_env(), SimulationConfig.from_env())

    # =========================================================================
    # Critérios de informação
    # =========================================================================

    def select(self, d: Dataset, criterion: CriterionSpec, plan: Optional[str] = None) -> FitResult:
        """
        Minimiza o critério com o plano padrão ou um plano textual.

        Args:
            d: Conjunto de dados
            criterion: Critério final
            plan: "default", "escape" ou texto como "screen:0.15,forward:bic,stepwise:mbic2"

        Returns:
            Resultado da busca
        """
        if plan in (None, "", "default"):
            search_plan = SearchPlan.default(criterion, self.search_config.screen_threshold)
        elif plan == "escape":
            search_plan = SearchPlan.escape(criterion)
        else:
            search_plan = SearchPlan.parse(plan, criterion)
        result = run_plan(d, search_plan, config=self.search_config)
        logger.info(format_selection_summary([d.names[j] for j in result.support], criterion.label))
        return result

    def select_variables(
        self,
        path: PathLike,
        response: str,
        criterion: CriterionSpec,
        *,
        family: Union[Family, str] = Family.GAUSSIAN,
        plan: Optional[str] = None,
    ) -> Dict[str, Any]:
        """Lê o CSV, executa a busca e devolve o resumo serializável."""
        d = load_csv(path, response, family)
        result = self.select(d, criterion, plan)
        payload = fit_result_dict(result, d.names)
        payload.update(family=d.family.value, n=d.n, p=d.p, response=response)
        return payload

    def threshold(
        self,
        fit_path: PathLike,
        path: PathLike,
        response: str,
        criterion: CriterionSpec,
        *,
        family: Union[Family, str] = Family.GAUSSIAN,
    ) -> Dict[str, Any]:
        """
        Eliminação backward sobre o suporte de um ajuste anterior.

        A penalidade usa p_total igual ao número de colunas do arquivo completo.

        Raises:
            DataError: Se o ajuste citar colunas inexistentes
        """
        d = load_csv(path, response, family)
        names = list(read_selection(fit_path)["selected"])
        index = {name: j for j, name in enumerate(d.names)}
        unknown = [name for name in names if name not in index]
        if unknown:
            raise DataError(f"missing-column: {unknown} não estão em {path}")
        spec = criterion.model_copy(update={"p_total": criterion.p_total or d.p})
        support = tuple(sorted(index[name] for name in names))
        input_value = criterion_value(d, spec, support, self.search_config)
        result = backward(d, spec, support, config=self.search_config)
        payload = fit_result_dict(result, d.names)
        payload.update(input_selected=names, input_criterion_value=input_value, family=d.family.value,
                       n=d.n, p=d.p, response=response)
        return payload

    # =========================================================================
    # SLOPE e LASSO
    # =========================================================================

    def _sequence(
        self,
        method: CvMethod,
        d: Dataset,
        rule: str,
        *,
        q: float,
        c: float,
        delta: float,
        sigma: Optional[float],
        lam: Optional[float],
        lambda_path: Optional[PathLike],
    ) -> LambdaSequence:
        if lambda_path is not None:
            return make_lambda("explicit", d.p, values=read_lambda(lambda_path))
        needs_sigma = rule in ("heuristic", "bonferroni")
        noise = sigma if sigma is not None or not needs_sigma else estimate_sigma(d)
        if method == CvMethod.LASSO:
            if rule == "bonferroni":
                return make_lambda("bonferroni", d.p, q=q, sigma=noise)
            if lam is None:
                raise ValueError("LASSO com regra constant requer lambda")
            return make_lambda("constant", d.p, value=lam)
        if rule == "bh":
            return make_lambda("bh", d.p, q=q, c=c)
        if rule == "inflated":
            return make_lambda("inflated-bh", d.p, q=q, c=c, delta=delta)
        if rule == "heuristic":
            return make_lambda("heuristic", d.p, q=q, sigma=noise, n=d.n)
        if rule == "second-order":
            return make_lambda("second-order", d.p, scale=c)
        raise ValueError(f"Regra desconhecida: {rule!r}")

    def fit_penalized(
        self,
        path: PathLike,
        response: str,
        method: Union[CvMethod, str] = CvMethod.SLOPE,
        *,
        rule: str = "bh",
        q: float = 0.2,
        c: float = 1.0,
        delta: float = 0.05,
        sigma: Optional[float] = None,
        lam: Optional[float] = None,
        lambda_path: Optional[PathLike] = None,
        family: Union[Family, str] = Family.GAUSSIAN,
        scaling: Union[ScalingMode, str] = ScalingMode.UNIT_L2_ONE,
        cv: bool = False,
        folds: int = 10,
        seed: int = 0,
        one_se: bool = False,
        path_scales: Optional[Sequence[float]] = None,
    ) -> SlopeRun:
        """
        Ajusta SLOPE ou LASSO com λ fixo ou escolhido por validação cruzada.

        Args:
            path: CSV de entrada
            response: Coluna resposta
            method: slope ou lasso
            rule: Regra de λ (slope: bh, inflated, heuristic, second-order;
                lasso: constant, bonferroni)
            q, c, delta: Parâmetros das regras
            sigma: σ do ruído (estimado por mínimos quadrados se preciso e ausente)
            lam: λ constante do LASSO
            lambda_path: CSV de uma coluna com λ explícito
            family: gaussian ou binomial
            scaling: Padronização das colunas antes do ajuste
            cv: Escolhe λ por validação cruzada
            folds, seed, one_se: Parâmetros da validação cruzada
            path_scales: Multiplicadores c do caminho (opcional)

        Returns:
            SlopeRun com coeficientes na escala original
        """
        method = CvMethod(method)
        d = load_csv(path, response, family)
        std, info = standardize(d, scaling)
        cv_result: Optional[CvResult] = None
        if cv:
            cv_result = cv_select(std, CvSpec(folds=folds, seed=seed, one_se=one_se), method,
                                  config=self.solver_config)
            fit = cv_result.refit
            lam_seq = LambdaSequence(fit.lam, "explicit", {"cv_point": to_builtin(cv_result.best_point)})
            intercept_std = cv_result.intercept
        else:
            lam_seq = self._sequence(method, std, rule, q=q, c=c, delta=delta, sigma=sigma, lam=lam,
                                     lambda_path=lambda_path)
            fit = fit_slope(std, lam_seq, config=self.solver_config)
            intercept_std = fit.intercept
        intercept, beta = info.coefficients_to_original(fit.coefficients, intercept_std)
        payload = slope_fit_dict(fit, d.names, intercept)
        payload["coefficients"] = {d.names[j]: float(beta[j]) for j in fit.support}
        payload.update(method=method.value, rule="cv" if cv else lam_seq.rule.value, params=to_builtin(lam_seq.params),
                       truncated=lam_seq.truncated, scaling=ScalingMode(scaling).value, family=d.family.value,
                       n=d.n, p=d.p, response=response)
        if cv_result is not None:
            payload["cv"] = to_builtin(summarize(cv_result))
        points: List[PathPoint] = []
        if path_scales:
            points = slope_path(std, lam_seq, path_scales, config=self.solver_config)
            payload["path"] = [
                {"scale": point.scale, "nonzero": point.fit.n_nonzero, "clusters": point.fit.n_clusters}
                for point in points
            ]
        return SlopeRun(payload=payload, fit=fit, lam=lam_seq, cv=cv_result, path=points)

    # =========================================================================
    # Knockoffs
    # =========================================================================

    def knockoff(
        self,
        path: PathLike,
        response: str,
        *,
        sigma_path: Optional[PathLike] = None,
        q: float = 0.2,
        seed: int = 0,
        folds: int = 10,
    ) -> tuple[Dict[str, Any], KnockoffResult]:
        """
        Filtro knockoff sobre as colunas centralizadas do CSV.

        Sem arquivo de Σ, usa a estimativa de Ledoit-Wolf da covariância.

        Raises:
            DataError: Σ com dimensão incompatível
        """
        d = load_csv(path, response)
        centred, _ = standardize(d, ScalingMode.CENTER)
        if sigma_path is not None:
            sigma = read_table(sigma_path).to_numpy(dtype=float)
            if sigma.shape != (d.p, d.p):
                raise DataError(f"Σ deve ser {d.p}×{d.p}, recebido {sigma.shape}")
            source = str(sigma_path)
        else:
            sigma = LedoitWolf(assume_centered=True).fit(centred.X).covariance_
            source = "ledoit-wolf"
        result = knockoff_filter(
            centred, sigma, q, rng=RngStream(seed), cv=CvSpec(folds=folds, seed=seed), config=self.solver_config,
        )
        payload = knockoff_dict(result, d.names)
        payload.update(sigma_source=source, seed=seed, n=d.n, p=d.p, response=response)
        return payload, result

    # =========================================================================
    # Simulação
    # =========================================================================

    def list_scenarios(self) -> List[Dict[str, Any]]:
        """Cenários embutidos com suas dimensões no n padrão."""
        rows = []
        for name, spec in builtin_scenarios().items():
            n, p, k = spec.dimensions()
            rows.append({
                "name": name, "n": n, "p": p, "k": k, "n_values": spec.n_values,
                "replicates": spec.replicates, "methods": list(spec.methods),
            })
        return rows

    def simulate(
        self,
        scenario: str,
        *,
        replicates: Optional[int] = None,
        seed: Optional[int] = None,
        methods: Optional[Sequence[str]] = None,
        n: Optional[int] = None,
        study: bool = False,
        n_jobs: Optional[int] = None,
        output_dir: Optional[PathLike] = None,
    ) -> List[MetricsReport]:
        """
        Executa um cenário embutido ou os cenários de um arquivo JSON.

        Returns:
            Um relatório por cenário (resultados gravados em output_dir)
        """
        reports = []
        for spec in resolve_scenario(scenario):
            if seed is not None:
                spec = spec.with_overrides(seed=seed)
            kwargs: Dict[str, Any] = {"methods": methods, "replicates": replicates}
            if n_jobs is not None:
                kwargs["n_jobs"] = n_jobs
            if not study:
                kwargs["n"] = n
            reports.append(run_configured(spec, self.simulation_config, study=study, output_dir=output_dir, **kwargs))
        return reports
