"""
Registro dos métodos de seleção avaliados nas simulações.

Cada método recebe o conjunto de dados de uma réplica e um contexto
(covariância conhecida, σ, q, validação cruzada, fluxo aleatório) e
devolve o suporte selecionado e a estimativa de β na escala de X.
"""
from __future__ import annotations

import zlib
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from ..core.config import SearchConfig, SolverConfig
from ..core.dataset import LANE_METHOD, Dataset, RngStream, standardize
from ..core.entities import CriterionKind, CriterionSpec, CvMethod, CvSpec, ScalingMode, SearchPlan
from ..knockoffs.filter import knockoff_filter
from ..search.stepwise import run_plan
from ..slope.cross_validation import cv_select
from ..slope.lambdas import LambdaSequence, make_lambda
from ..slope.solver import fit_slope

HARNESS_GRID_SIZE = 40


@dataclass(frozen=True)
class MethodContext:
    """
    Informação disponível aos métodos numa réplica.

    Attributes:
        stream: Fluxo aleatório da réplica
        noise_sigma: σ do ruído (conhecido pelos métodos SLOPE)
        q: Nível nominal
        cv_folds: Folds da validação cruzada
        covariance: Covariância das linhas de X (knockoffs)
        true_support: Suporte verdadeiro (oráculo)
        true_beta: β verdadeiro (oráculo)
        cv_grid_size: Tamanho da grade LASSO
    """
    stream: RngStream
    noise_sigma: float = 1.0
    q: float = 0.2
    cv_folds: int = 10
    covariance: Optional[np.ndarray] = None
    true_support: Tuple[int, ...] = ()
    true_beta: Optional[np.ndarray] = None
    cv_grid_size: int = HARNESS_GRID_SIZE
    search_config: SearchConfig = field(default_factory=SearchConfig)
    solver_config: SolverConfig = field(default_factory=SolverConfig)

    def generator(self, method: str) -> np.random.Generator:
        """Subcanal de método, independente dos demais métodos da réplica."""
        return self.stream.generator(LANE_METHOD, zlib.crc32(method.encode("utf-8")))

    def cv_seed(self, method: str) -> int:
        return int(self.generator(method).integers(0, 2 ** 31 - 1))


@dataclass(frozen=True)
class MethodOutcome:
    """Suporte selecionado e β estimado (p,)."""
    support: Tuple[int, ...]
    beta: np.ndarray


MethodFn = Callable[[Dataset, MethodContext], MethodOutcome]


def _criterion_method(kind: CriterionKind) -> MethodFn:
    def run(d: Dataset, ctx: MethodContext) -> MethodOutcome:
        plan = SearchPlan.default(CriterionSpec(kind=kind), ctx.search_config.screen_threshold)
        result = run_plan(d, plan, config=ctx.search_config)
        return MethodOutcome(result.support, result.coefficient_vector(d.p))
    return run


def _slope_fixed(build: Callable[[Dataset, MethodContext], LambdaSequence]) -> MethodFn:
    def run(d: Dataset, ctx: MethodContext) -> MethodOutcome:
        centred, _ = standardize(d, ScalingMode.CENTER)
        fit = fit_slope(centred, build(d, ctx), config=ctx.solver_config)
        return MethodOutcome(fit.support, fit.coefficients.copy())
    return run


def _cv_method(method: CvMethod, name: str) -> MethodFn:
    def run(d: Dataset, ctx: MethodContext) -> MethodOutcome:
        spec = CvSpec(folds=ctx.cv_folds, seed=ctx.cv_seed(name), grid_size=ctx.cv_grid_size)
        result = cv_select(d, spec, method, config=ctx.solver_config)
        return MethodOutcome(result.refit.support, result.refit.coefficients.copy())
    return run


def _knockoff_lasso_cv(d: Dataset, ctx: MethodContext) -> MethodOutcome:
    covariance = ctx.covariance if ctx.covariance is not None else np.eye(d.p)
    name = "knockoff-lasso-cv"
    spec = CvSpec(folds=ctx.cv_folds, seed=ctx.cv_seed(name), grid_size=ctx.cv_grid_size)
    result = knockoff_filter(d, covariance, ctx.q, rng=ctx.generator(name), cv=spec, config=ctx.solver_config)
    beta = np.zeros(d.p)
    if result.selected and result.coefficients is not None:
        chosen = list(result.selected)
        beta[chosen] = result.coefficients[chosen]
    return MethodOutcome(result.selected, beta)


def _oracle(d: Dataset, ctx: MethodContext) -> MethodOutcome:
    beta = np.zeros(d.p) if ctx.true_beta is None else np.asarray(ctx.true_beta, dtype=float).copy()
    return MethodOutcome(tuple(sorted(ctx.true_support)), beta)


def _registry() -> Dict[str, MethodFn]:
    methods: Dict[str, MethodFn] = {kind.value: _criterion_method(kind) for kind in CriterionKind}
    methods.update({
        "slope-bh": _slope_fixed(
            lambda d, ctx: make_lambda("bh", d.p, q=ctx.q, c=ctx.noise_sigma)),
        "slope-inflated-05": _slope_fixed(
            lambda d, ctx: make_lambda("inflated-bh", d.p, q=ctx.q, c=ctx.noise_sigma, delta=0.05)),
        "slope-inflated-10": _slope_fixed(
            lambda d, ctx: make_lambda("inflated-bh", d.p, q=ctx.q, c=ctx.noise_sigma, delta=0.10)),
        "slope-heuristic": _slope_fixed(
            lambda d, ctx: make_lambda("heuristic", d.p, q=ctx.q, sigma=ctx.noise_sigma, n=d.n)),
        "lasso-bonferroni": _slope_fixed(
            lambda d, ctx: make_lambda("bonferroni", d.p, q=ctx.q, sigma=ctx.noise_sigma)),
        "slope-cv": _cv_method(CvMethod.SLOPE, "slope-cv"),
        "lasso-cv": _cv_method(CvMethod.LASSO, "lasso-cv"),
        "knockoff-lasso-cv": _knockoff_lasso_cv,
        "oracle": _oracle,
    })
    return methods


METHODS: Dict[str, MethodFn] = _registry()


def available_methods() -> List[str]:
    return list(METHODS)


def resolve_method(name: str) -> MethodFn:
    """
    Função do método pelo nome.

    Raises:
        ValueError: Método desconhecido
    """
    key = name.strip().lower()
    if key not in METHODS:
        raise ValueError(f"Método desconhecido: {name!r}. Disponíveis: {', '.join(METHODS)}")
    return METHODS[key]
