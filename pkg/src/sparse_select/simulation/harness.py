"""
Execução Monte Carlo dos cenários.

Cada réplica usa o fluxo RngStream(seed, réplica): o resultado não
depende do número de processos nem da ordem de execução.
"""
from __future__ import annotations

import time
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
from joblib import Parallel, delayed

from ..core.config import SearchConfig, SimulationConfig, SolverConfig
from ..core.dataset import LANE_EFFECTS, LANE_NOISE, Dataset, RngStream, draw_gaussian_design
from ..utils.logging_setup import get_logger
from ..utils.serialization import write_simulation
from .methods import MethodContext, resolve_method
from .metrics import MetricsReport, combine_reports, replicate_record, summarize_records
from .scenarios import ScenarioSpec

logger = get_logger(__name__)


def draw_replicate(spec: ScenarioSpec, n: int, replicate: int) -> tuple[Dataset, np.ndarray, List[int]]:
    """
    Sorteia (dados, β verdadeiro, suporte verdadeiro) de uma réplica.

    Canais do fluxo: desenho, ruído e efeitos são independentes entre si.
    """
    n, p, k = spec.dimensions(n)
    stream = RngStream(spec.seed, replicate)
    X = draw_gaussian_design(n, p, spec.design, spec.row_factor(n), stream)
    truth = spec.causal_indices(p, k)
    beta = np.zeros(p)
    beta[truth] = spec.effect.draw(len(truth), p, stream.generator(LANE_EFFECTS))
    noise = stream.generator(LANE_NOISE).standard_normal(n)
    y = X @ beta + spec.noise_sigma * noise
    return Dataset(y=y, X=X), beta, truth


def simulate_replicate(
    spec: ScenarioSpec,
    n: int,
    replicate: int,
    methods: Sequence[str],
    search_config: Optional[SearchConfig] = None,
    solver_config: Optional[SolverConfig] = None,
) -> List[Dict[str, Any]]:
    """
    Roda todos os métodos numa réplica.

    Falhas de um método são registradas (failed=True) sem interromper os demais.

    Returns:
        Um registro bruto por método
    """
    d, beta, truth = draw_replicate(spec, n, replicate)
    covariance = spec.design.covariance(d.p) * spec.row_factor(d.n) ** 2
    ctx = MethodContext(
        stream=RngStream(spec.seed, replicate),
        noise_sigma=spec.noise_sigma,
        q=spec.q,
        cv_folds=spec.cv_folds,
        covariance=covariance,
        true_support=tuple(truth),
        true_beta=beta,
        search_config=search_config or SearchConfig(),
        solver_config=solver_config or SolverConfig(),
    )
    records: List[Dict[str, Any]] = []
    base = dict(scenario=spec.name, n=d.n, p=d.p, replicate=replicate, truth=truth, true_beta=beta, X=d.X)
    for name in methods:
        method = resolve_method(name)
        try:
            outcome = method(d, ctx)
        except Exception as error:  # noqa: BLE001
            logger.warning("Método %s falhou na réplica %d de %s: %s", name, replicate, spec.name, error)
            records.append(replicate_record(method=name, error=f"{type(error).__name__}: {error}", **base))
            continue
        records.append(replicate_record(method=name, support=outcome.support, beta_hat=outcome.beta, **base))
    return records


def run_scenario(
    spec: ScenarioSpec,
    methods: Optional[Sequence[str]] = None,
    replicates: Optional[int] = None,
    n: Optional[int] = None,
    *,
    n_jobs: int = 1,
    delta0: float = 1.0,
    delta_a: float = 1.0,
    search_config: Optional[SearchConfig] = None,
    solver_config: Optional[SolverConfig] = None,
) -> MetricsReport:
    """
    Executa um cenário para um tamanho amostral.

    Args:
        spec: Cenário
        methods: Métodos (padrão: os do cenário)
        replicates: Número de réplicas (padrão: o do cenário)
        n: Tamanho amostral (padrão: spec.n)
        n_jobs: Processos paralelos entre réplicas
        delta0, delta_a: Perdas do risco de Bayes

    Returns:
        Registros por réplica e resumo agregado

    Raises:
        ValueError: Método desconhecido ou dimensões inválidas
    """
    methods = list(methods or spec.methods)
    for name in methods:
        resolve_method(name)
    replicates = replicates or spec.replicates
    n, p, k = spec.dimensions(n)
    logger.info("Cenário %s: n=%d, p=%d, k=%d, %d réplicas, métodos=%s", spec.name, n, p, k, replicates, methods)
    started = time.perf_counter()
    batches = Parallel(n_jobs=n_jobs)(
        delayed(simulate_replicate)(spec, n, r, methods, search_config, solver_config) for r in range(replicates)
    )
    records = [record for batch in batches for record in batch]
    report = summarize_records(records, delta0, delta_a)
    failures = sum(1 for record in records if record["failed"])
    logger.info("Cenário %s (n=%d) concluído em %.1fs, %d falhas", spec.name, n, time.perf_counter() - started, failures)
    return report


def run_study(
    spec: ScenarioSpec,
    n_values: Optional[Sequence[int]] = None,
    **kwargs: Any,
) -> MetricsReport:
    """Executa o cenário para cada n da grade (padrão: spec.n_values ou [spec.n])."""
    grid = list(n_values or spec.n_values or [spec.n])
    return combine_reports([run_scenario(spec, n=n, **kwargs) for n in grid])


def run_configured(
    spec: ScenarioSpec,
    config: Optional[SimulationConfig] = None,
    *,
    study: bool = False,
    output_dir: Union[str, Path, None] = None,
    **kwargs: Any,
) -> MetricsReport:
    """
    Executa com a configuração de simulação e grava os resultados.

    Returns:
        Relatório; registros e resumo são persistidos em output_dir
    """
    config = config or SimulationConfig.from_env()
    if kwargs.get("replicates") is None and config.replicates is not None:
        kwargs["replicates"] = config.replicates
    kwargs.setdefault("n_jobs", config.n_jobs)
    report = run_study(spec, **kwargs) if study else run_scenario(spec, **kwargs)
    write_simulation(report, Path(output_dir or config.output_dir), spec.name)
    return report
