"""
Linha de comando sparse-select.

Códigos de saída: 0 sucesso, 2 erro de dados, 3 falha de ajuste.
Resultados vão para arquivos e stdout; logs vão para stderr.
"""
from __future__ import annotations

import json
from dataclasses import replace
from enum import Enum
from functools import wraps
from pathlib import Path
from typing import Any, Callable, List, Optional, TypeVar

import typer

from .core.config import ServerConfig
from .core.entities import CriterionKind, CriterionSpec, CvMethod, Family, ScalingMode
from .core.exceptions import DataError, FitError
from .core.service import SelectionService
from .server.runtime import run_server
from .simulation.fixtures import DEMO_SEED, write_demo
from .utils.formatting import format_selection_summary, to_builtin
from .utils.logging_setup import get_logger, setup_logging
from .utils.serialization import (
    write_cv_table,
    write_json,
    write_knockoff,
    write_lambda,
    write_path_table,
    write_selection,
)

logger = get_logger(__name__)

EXIT_DATA_ERROR = 2
EXIT_FIT_ERROR = 3

app = typer.Typer(
    name="sparse-select",
    help="Seleção de variáveis: critérios L0, SLOPE/LASSO, knockoffs e simulações.",
    no_args_is_help=True,
    add_completion=False,
)

F = TypeVar("F", bound=Callable[..., Any])


class SlopeRuleOption(str, Enum):
    BH = "bh"
    INFLATED = "inflated"
    HEURISTIC = "heuristic"
    SECOND_ORDER = "second-order"


class LassoRuleOption(str, Enum):
    CONSTANT = "constant"
    BONFERRONI = "bonferroni"


def _exit_codes(command: F) -> F:
    """Converte DataError (e demais ValueError) e FitError nos códigos de saída 2 e 3."""

    @wraps(command)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return command(*args, **kwargs)
        except DataError as error:
            logger.error("Erro de dados: %s", error)
            typer.echo(f"erro de dados: {error}", err=True)
            raise typer.Exit(EXIT_DATA_ERROR) from error
        except FitError as error:
            logger.error("Falha de ajuste: %s", error)
            typer.echo(f"falha de ajuste: {error}", err=True)
            raise typer.Exit(EXIT_FIT_ERROR) from error
        except ValueError as error:
            logger.error("Entrada inválida: %s", error)
            typer.echo(f"entrada inválida: {error}", err=True)
            raise typer.Exit(EXIT_DATA_ERROR) from error

    return wrapper  # type: ignore[return-value]


@app.callback()
def configure(
    log_level: str = typer.Option("WARNING", "--log-level", envvar="SPARSE_SELECT_LOG_LEVEL"),
    log_file: Optional[Path] = typer.Option(None, "--log-file", help="Arquivo de log (com timestamps)"),
) -> None:
    """Configura logging para todos os subcomandos."""
    setup_logging(log_level, str(log_file) if log_file else None)


def _criterion(kind: CriterionKind, E: float, const: float, kappa: float, sigma: Optional[float],
               p_total: Optional[int]) -> CriterionSpec:
    return CriterionSpec(kind=kind, E=E, const=const, kappa=kappa, sigma=sigma, p_total=p_total)


@app.command()
@_exit_codes
def select(
    data: Path = typer.Argument(..., help="CSV com cabeçalho"),
    response: str = typer.Option("y", "--response", "-r"),
    criterion: CriterionKind = typer.Option(CriterionKind.MBIC2, "--criterion", "-c"),
    plan: str = typer.Option("default", "--plan", help="default, escape ou estágios (screen:0.15,forward:bic,...)"),
    family: Family = typer.Option(Family.GAUSSIAN, "--family"),
    expected: float = typer.Option(4.0, "--E", help="Número esperado de sinais (mBIC/mBIC2)"),
    const: float = typer.Option(0.5, "--const", help="Constante do mAIC/mAIC2"),
    kappa: float = typer.Option(0.5, "--kappa", help="κ do EBIC"),
    sigma: Optional[float] = typer.Option(None, "--sigma", help="σ conhecido do ruído"),
    p_total: Optional[int] = typer.Option(None, "--p-total"),
    out: Path = typer.Option(Path("."), "--out", "-o"),
) -> None:
    """Minimiza um critério de informação por busca stepwise."""
    service = SelectionService.from_env()
    payload = service.select_variables(
        data, response, _criterion(criterion, expected, const, kappa, sigma, p_total), family=family, plan=plan,
    )
    write_selection(out, payload)
    typer.echo(format_selection_summary(payload["selected"], criterion.value))


def _penalized(method: CvMethod, data: Path, response: str, rule: str, out: Path, **kwargs: Any) -> None:
    service = SelectionService.from_env()
    run = service.fit_penalized(data, response, method, rule=rule, **kwargs)
    out.mkdir(parents=True, exist_ok=True)
    write_json(out / "fit.json", run.payload)
    write_selection(out, run.payload)
    write_lambda(out / "lambda.csv", run.lam.values)
    if run.cv is not None:
        write_cv_table(out / "cv.csv", run.cv)
    if run.path:
        write_path_table(out / "path.csv", run.path)
        for point in run.path:
            typer.echo(f"c={point.scale:g}: {point.fit.n_nonzero} não nulos, {point.fit.n_clusters} clusters")
    typer.echo(format_selection_summary(run.payload["selected"], method.value))


@app.command()
@_exit_codes
def slope(
    data: Path = typer.Argument(...),
    response: str = typer.Option("y", "--response", "-r"),
    rule: SlopeRuleOption = typer.Option(SlopeRuleOption.BH, "--rule"),
    q: float = typer.Option(0.2, "--q"),
    c: float = typer.Option(1.0, "--c"),
    delta: float = typer.Option(0.05, "--delta", help="Inflação da regra inflated"),
    sigma: Optional[float] = typer.Option(None, "--sigma"),
    lambda_file: Optional[Path] = typer.Option(None, "--lambda-file", help="CSV de uma coluna com λ"),
    family: Family = typer.Option(Family.GAUSSIAN, "--family"),
    scaling: ScalingMode = typer.Option(ScalingMode.UNIT_L2_ONE, "--scaling"),
    cv: bool = typer.Option(False, "--cv", help="Escolhe (c, q) por validação cruzada"),
    folds: int = typer.Option(10, "--folds"),
    seed: int = typer.Option(0, "--seed", envvar="SPARSE_SELECT_SEED"),
    one_se: bool = typer.Option(False, "--one-se"),
    path_scales: Optional[List[float]] = typer.Option(None, "--path", help="Multiplicadores c do caminho"),
    out: Path = typer.Option(Path("."), "--out", "-o"),
) -> None:
    """Ajusta SLOPE com sequência λ fixa ou validação cruzada."""
    if cv and lambda_file is not None:
        raise typer.BadParameter("--cv e --lambda-file são mutuamente exclusivos")
    _penalized(CvMethod.SLOPE, data, response, rule.value, out, q=q, c=c, delta=delta, sigma=sigma,
               lambda_path=lambda_file, family=family, scaling=scaling, cv=cv, folds=folds, seed=seed,
               one_se=one_se, path_scales=path_scales)


@app.command()
@_exit_codes
def lasso(
    data: Path = typer.Argument(...),
    response: str = typer.Option("y", "--response", "-r"),
    rule: LassoRuleOption = typer.Option(LassoRuleOption.CONSTANT, "--rule"),
    lam: Optional[float] = typer.Option(None, "--lambda"),
    q: float = typer.Option(0.2, "--q"),
    sigma: Optional[float] = typer.Option(None, "--sigma"),
    family: Family = typer.Option(Family.GAUSSIAN, "--family"),
    scaling: ScalingMode = typer.Option(ScalingMode.UNIT_L2_ONE, "--scaling"),
    cv: bool = typer.Option(False, "--cv", help="Escolhe λ por validação cruzada"),
    folds: int = typer.Option(10, "--folds"),
    seed: int = typer.Option(0, "--seed", envvar="SPARSE_SELECT_SEED"),
    one_se: bool = typer.Option(False, "--one-se"),
    path_scales: Optional[List[float]] = typer.Option(None, "--path"),
    out: Path = typer.Option(Path("."), "--out", "-o"),
) -> None:
    """Ajusta LASSO com λ constante, Bonferroni ou validação cruzada."""
    if cv and lam is not None:
        raise typer.BadParameter("--cv e --lambda são mutuamente exclusivos")
    if not cv and rule == LassoRuleOption.CONSTANT and lam is None:
        raise typer.BadParameter("--lambda é obrigatório com --rule constant sem --cv")
    _penalized(CvMethod.LASSO, data, response, rule.value, out, lam=lam, q=q, sigma=sigma, family=family,
               scaling=scaling, cv=cv, folds=folds, seed=seed, one_se=one_se, path_scales=path_scales)


@app.command()
@_exit_codes
def knockoff(
    data: Path = typer.Argument(...),
    response: str = typer.Option("y", "--response", "-r"),
    sigma: Optional[Path] = typer.Option(None, "--sigma", help="CSV p×p com cabeçalho (padrão: Ledoit-Wolf)"),
    q: float = typer.Option(0.2, "--q"),
    folds: int = typer.Option(10, "--folds"),
    seed: int = typer.Option(0, "--seed", envvar="SPARSE_SELECT_SEED"),
    out: Path = typer.Option(Path("."), "--out", "-o"),
) -> None:
    """Filtro knockoff: W, limiar t̂ e seleção Ŝ."""
    service = SelectionService.from_env()
    payload, _ = service.knockoff(data, response, sigma_path=sigma, q=q, seed=seed, folds=folds)
    write_knockoff(out, payload)
    typer.echo(format_selection_summary(payload["selected"], "knockoff"))


@app.command()
@_exit_codes
def threshold(
    fit: Path = typer.Argument(..., help="selection.json ou fit.json de um ajuste anterior"),
    data: Path = typer.Argument(...),
    response: str = typer.Option("y", "--response", "-r"),
    criterion: CriterionKind = typer.Option(CriterionKind.MBIC2, "--criterion", "-c"),
    family: Family = typer.Option(Family.GAUSSIAN, "--family"),
    expected: float = typer.Option(4.0, "--E", help="Número esperado de sinais (mBIC/mBIC2)"),
    const: float = typer.Option(0.5, "--const", help="Constante do mAIC/mAIC2"),
    kappa: float = typer.Option(0.5, "--kappa", help="κ do EBIC"),
    sigma: Optional[float] = typer.Option(None, "--sigma", help="σ conhecido do ruído"),
    p_total: Optional[int] = typer.Option(None, "--p-total"),
    out: Path = typer.Option(Path("."), "--out", "-o"),
) -> None:
    """Reduz o suporte de um ajuste por eliminação backward."""
    service = SelectionService.from_env()
    spec = _criterion(criterion, expected, const, kappa, sigma, p_total)
    payload = service.threshold(fit, data, response, spec, family=family)
    write_selection(out, payload)
    typer.echo(format_selection_summary(payload["selected"], f"{criterion.value} (backward)"))


@app.command()
@_exit_codes
def simulate(
    scenario: Optional[str] = typer.Argument(None, help="Nome de cenário embutido ou arquivo .json/.jsonl"),
    replicates: Optional[int] = typer.Option(None, "--replicates"),
    seed: Optional[int] = typer.Option(None, "--seed", envvar="SPARSE_SELECT_SEED"),
    methods: Optional[List[str]] = typer.Option(None, "--method", "-m"),
    n: Optional[int] = typer.Option(None, "--n"),
    study: bool = typer.Option(False, "--study", help="Percorre a grade n_values do cenário"),
    jobs: Optional[int] = typer.Option(None, "--jobs", "-j", envvar="SPARSE_SELECT_JOBS"),
    out: Optional[Path] = typer.Option(None, "--out", "-o"),
    list_only: bool = typer.Option(False, "--list", help="Lista os cenários embutidos e sai"),
) -> None:
    """Executa um estudo Monte Carlo e grava as tabelas CSV."""
    service = SelectionService.from_env()
    if list_only:
        typer.echo(json.dumps(to_builtin(service.list_scenarios()), indent=2, sort_keys=True))
        return
    if scenario is None:
        raise typer.BadParameter("informe um cenário ou use --list")
    if study and n is not None:
        raise typer.BadParameter("--study e --n são mutuamente exclusivos")
    reports = service.simulate(scenario, replicates=replicates, seed=seed, methods=methods, n=n,
                               study=study, n_jobs=jobs, output_dir=out)
    for report in reports:
        typer.echo(report.wide().to_string(index=False))


@app.command()
@_exit_codes
def demo(
    out: Path = typer.Option(Path("demo"), "--out", "-o"),
    seed: int = typer.Option(DEMO_SEED, "--seed"),
) -> None:
    """Grava os CSVs de demonstração a partir da semente geradora."""
    for name, path in write_demo(out, seed).items():
        typer.echo(f"{name}: {path}")


@app.command()
def serve(
    transport: Optional[str] = typer.Option(None, "--transport", help="stdio, http ou sse"),
    namespace: Optional[str] = typer.Option(None, "--namespace"),
) -> None:
    """Inicia o servidor MCP."""
    config = ServerConfig.from_env()
    overrides = {key: value for key, value in (("transport", transport), ("namespace", namespace)) if value}
    run_server(replace(config, **overrides))


def main() -> None:
    """Entry point do script sparse-select."""
    app()


__all__ = ["app", "main"]
