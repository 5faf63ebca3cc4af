"""
Configuração de logging estruturado para o sistema sparse_select.
"""
import logging
import sys
from pathlib import Path
from typing import Optional, Union

_LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
_HANDLER_MARK = "_sparse_select_handler"


def setup_logging(log_level: str = "INFO", log_file: Optional[Union[str, Path]] = None) -> None:
    """
    Configura logging estruturado para o sistema.

    Args:
        log_level: Nível de logging (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_file: Arquivo opcional que também recebe as mensagens (com timestamps)
    """
    level = getattr(logging, log_level.upper())
    root_logger = logging.getLogger()
    for old in [h for h in root_logger.handlers if getattr(h, _HANDLER_MARK, False)]:
        root_logger.removeHandler(old)
        old.close()

    # stderr apenas: stdout carrega o tráfego MCP e os resultados da CLI
    handlers: list[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file is not None:
        handlers.append(logging.FileHandler(log_file, encoding="utf-8"))
    for handler in handlers:
        handler.setFormatter(logging.Formatter(_LOG_FORMAT))
        setattr(handler, _HANDLER_MARK, True)
        root_logger.addHandler(handler)
    root_logger.setLevel(level)

    logger = logging.getLogger("sparse_select")
    logger.setLevel(level)


def get_logger(name: str) -> logging.Logger:
    """
    Retorna logger configurado para o módulo especificado.

    Args:
        name: Nome do módulo (geralmente __name__)

    Returns:
        Logger configurado
    """
    if name.startswith("sparse_select"):
        return logging.getLogger(name)
    return logging.getLogger(f"sparse_select.{name}")
