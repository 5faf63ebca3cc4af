"""
Configurações centralizadas para o sistema sparse_select.
"""
import os
from dataclasses import dataclass
from typing import Optional


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError as error:
        raise ValueError(f"{name} deve ser um inteiro, recebido {raw!r}") from error


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    try:
        return float(raw)
    except ValueError as error:
        raise ValueError(f"{name} deve ser um número real, recebido {raw!r}") from error


def _env_bool(name: str, default: bool) -> bool:
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    return raw.lower() in ("1", "true", "yes", "on")


@dataclass(frozen=True)
class SolverConfig:
    """
    Configuração do solver de gradiente proximal acelerado (FISTA).

    Attributes:
        max_iter: Número máximo de iterações
        tol: Tolerância na variação relativa do objetivo
        kkt_tol: Tolerância no resíduo KKT
        monotone: Se deve usar a variante monótona do FISTA
        power_iterations: Iterações do método da potência para estimar L
        cluster_tol: Tolerância absoluta para agrupar |β| iguais
    """
    max_iter: int = 5000
    tol: float = 1e-7
    kkt_tol: float = 1e-6
    monotone: bool = True
    power_iterations: int = 20
    cluster_tol: float = 1e-8

    @classmethod
    def from_env(cls) -> "SolverConfig":
        """
        Cria configuração a partir de variáveis de ambiente.

        Variáveis de ambiente:
            SPARSE_SELECT_SOLVER_MAX_ITER: Iterações máximas (padrão: 5000)
            SPARSE_SELECT_SOLVER_TOL: Tolerância do objetivo (padrão: 1e-7)
            SPARSE_SELECT_SOLVER_KKT_TOL: Tolerância KKT (padrão: 1e-6)
            SPARSE_SELECT_SOLVER_MONOTONE: FISTA monótono (padrão: true)

        Returns:
            Configuração criada
        """
        return cls(
            max_iter=_env_int("SPARSE_SELECT_SOLVER_MAX_ITER", 5000),
            tol=_env_float("SPARSE_SELECT_SOLVER_TOL", 1e-7),
            kkt_tol=_env_float("SPARSE_SELECT_SOLVER_KKT_TOL", 1e-6),
            monotone=_env_bool("SPARSE_SELECT_SOLVER_MONOTONE", True),
        )


@dataclass(frozen=True)
class SearchConfig:
    """
    Configuração da busca stepwise.

    Attributes:
        screen_threshold: Limiar de p-valor marginal da triagem
        irls_max_iter: Iterações máximas do IRLS (família binomial)
        irls_tol: Tolerância do IRLS na variação da deviance
        max_size: Tamanho máximo do modelo; None usa floor(min(p/4, n/2))
        n_jobs: Paralelismo na avaliação de candidatos binomiais
    """
    screen_threshold: float = 0.15
    irls_max_iter: int = 100
    irls_tol: float = 1e-10
    max_size: Optional[int] = None
    n_jobs: int = 1

    @classmethod
    def from_env(cls) -> "SearchConfig":
        """
        Cria configuração a partir de variáveis de ambiente.

        Variáveis de ambiente:
            SPARSE_SELECT_SEARCH_SCREEN: Limiar da triagem (padrão: 0.15)
            SPARSE_SELECT_SEARCH_IRLS_MAX_ITER: Iterações do IRLS (padrão: 100)
            SPARSE_SELECT_SEARCH_MAX_SIZE: Tamanho máximo do modelo (padrão: automático)

        Returns:
            Configuração criada
        """
        max_size = os.getenv("SPARSE_SELECT_SEARCH_MAX_SIZE")
        return cls(
            screen_threshold=_env_float("SPARSE_SELECT_SEARCH_SCREEN", 0.15),
            irls_max_iter=_env_int("SPARSE_SELECT_SEARCH_IRLS_MAX_ITER", 100),
            max_size=_env_int("SPARSE_SELECT_SEARCH_MAX_SIZE", 0) if max_size else None,
        )


@dataclass(frozen=True)
class SimulationConfig:
    """
    Configuração do harness de simulação e da CLI.

    Attributes:
        seed: Semente padrão (64 bits, não negativa)
        n_jobs: Número de processos para réplicas; -1 usa todos os núcleos
        replicates: Substitui o número de réplicas dos cenários (None mantém)
        output_dir: Diretório padrão de saída
    """
    seed: int = 20240101
    n_jobs: int = -1
    replicates: Optional[int] = None
    output_dir: str = "results"

    @classmethod
    def from_env(cls) -> "SimulationConfig":
        """
        Cria configuração a partir de variáveis de ambiente.

        Variáveis de ambiente:
            SPARSE_SELECT_SEED: Semente padrão (padrão: 20240101)
            SPARSE_SELECT_JOBS: Processos paralelos (padrão: -1)
            SPARSE_SELECT_REPLICATES: Réplicas por cenário (padrão: do cenário)
            SPARSE_SELECT_OUTPUT_DIR: Diretório de saída (padrão: results)

        Returns:
            Configuração criada

        Raises:
            ValueError: Se SPARSE_SELECT_SEED for negativa
        """
        seed = _env_int("SPARSE_SELECT_SEED", 20240101)
        if seed < 0:
            raise ValueError("SPARSE_SELECT_SEED deve ser não negativa")
        replicates = os.getenv("SPARSE_SELECT_REPLICATES")
        return cls(
            seed=seed,
            n_jobs=_env_int("SPARSE_SELECT_JOBS", -1),
            replicates=_env_int("SPARSE_SELECT_REPLICATES", 0) if replicates else None,
            output_dir=os.getenv("SPARSE_SELECT_OUTPUT_DIR", "results"),
        )


@dataclass(frozen=True)
class ServerConfig:
    """
    Configuração do servidor MCP.

    Attributes:
        namespace: Namespace para prefixar nomes de tools
        log_level: Nível de logging (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        transport: Tipo de transporte (stdio, http, sse)
        host: Host para servidor HTTP/SSE
        port: Porta para servidor HTTP/SSE
        path: Path para servidor HTTP/SSE
    """
    namespace: str = ""
    log_level: str = "INFO"
    transport: str = "stdio"
    host: str = "127.0.0.1"
    port: int = 8000
    path: str = "/mcp/"

    @classmethod
    def from_env(cls) -> "ServerConfig":
        """
        Cria configuração a partir de variáveis de ambiente.

        Variáveis de ambiente:
            MCP_NAMESPACE: Namespace (padrão: "")
            MCP_LOG_LEVEL: Nível de log (padrão: INFO)
            MCP_TRANSPORT: Tipo de transporte (padrão: stdio)
            MCP_HOST: Host (padrão: 127.0.0.1)
            MCP_PORT: Porta (padrão: 8000)
            MCP_PATH: Path (padrão: /mcp/)

        Returns:
            Configuração criada
        """
        return cls(
            namespace=os.getenv("MCP_NAMESPACE", ""),
            log_level=os.getenv("MCP_LOG_LEVEL", "INFO"),
            transport=os.getenv("MCP_TRANSPORT", "stdio"),
            host=os.getenv("MCP_HOST", "127.0.0.1"),
            port=_env_int("MCP_PORT", 8000),
            path=os.getenv("MCP_PATH", "/mcp/"),
        )
