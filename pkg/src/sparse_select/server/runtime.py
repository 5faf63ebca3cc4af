"""Runtime utilities to bootstrap the sparse-select MCP server."""

from __future__ import annotations

from ..core.config import ServerConfig
from ..core.service import SelectionService
from ..utils.logging_setup import get_logger, setup_logging
from .mcp_server import create_mcp_server

logger = get_logger(__name__)


def run_server(config: ServerConfig | None = None) -> None:
    """Bootstrap FastMCP and start the server using configuration from the environment."""

    server_config = config or ServerConfig.from_env()
    setup_logging(server_config.log_level)
    logger.info("Iniciando servidor MCP sparse-select (namespace=%s)", server_config.namespace or "default")

    mcp = create_mcp_server(
        SelectionService.from_env(),
        namespace=server_config.namespace,
        log_level=server_config.log_level,
    )

    transport = server_config.transport
    mount_path = None

    if transport == "http":
        transport = "streamable-http"
    if transport == "sse":
        mount_path = server_config.path

    logger.info("Executando FastMCP com transporte %s", transport)
    mcp.run(transport=transport, mount_path=mount_path)


def main() -> None:
    """Entry point compatible with ``python -m sparse_select.server``."""

    run_server()


__all__ = ["main", "run_server"]
