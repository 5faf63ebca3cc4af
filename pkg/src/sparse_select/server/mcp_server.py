"""FastMCP server definition exposing the variable-selection workflows."""

from __future__ import annotations

from functools import partial
from typing import Any, Optional

import anyio
from mcp.server.fastmcp import FastMCP
from mcp.server.fastmcp.exceptions import ToolError
from mcp.types import ToolAnnotations

from ..core.entities import CriterionSpec
from ..core.service import SelectionService
from ..utils.formatting import format_namespace, to_builtin
from ..utils.logging_setup import get_logger
from ..utils.validation import validate_probability

logger = get_logger(__name__)


def _handle_error(message: str, error: Exception) -> ToolError:
    """Log and wrap exceptions in ToolError."""
    logger.exception(message, exc_info=error)
    return ToolError(str(error))


def create_mcp_server(
    service: SelectionService,
    *,
    namespace: str = "",
    log_level: str = "INFO",
) -> FastMCP:
    """Create and configure a FastMCP instance for the selection tools."""

    mcp = FastMCP(
        name="sparse-select",
        log_level=log_level,
    )

    prefix = format_namespace(namespace)

    @mcp.tool(  # type: ignore[misc]
        name=f"{prefix}select_variables",
        title="Select Variables By Information Criterion",
        annotations=ToolAnnotations(readOnlyHint=True),
    )
    async def select_variables(
        csv_path: str,
        response: str,
        criterion: str = "mbic2",
        family: str = "gaussian",
        plan: Optional[str] = None,
        expected_signals: float = 4.0,
    ) -> dict[str, Any]:
        """Minimize an L0 information criterion over a CSV dataset."""

        try:
            spec = CriterionSpec(kind=criterion, E=expected_signals)
            call = partial(service.select_variables, csv_path, response, spec, family=family, plan=plan)
            return await anyio.to_thread.run_sync(call)
        except Exception as error:  # noqa: BLE001
            raise _handle_error("Falha na seleção por critério", error) from error

    @mcp.tool(  # type: ignore[misc]
        name=f"{prefix}fit_slope",
        title="Fit SLOPE Or LASSO",
        annotations=ToolAnnotations(readOnlyHint=True),
    )
    async def fit_slope(
        csv_path: str,
        response: str,
        method: str = "slope",
        rule: str = "bh",
        q: float = 0.2,
        c: float = 1.0,
        lam: Optional[float] = None,
        family: str = "gaussian",
        cv: bool = False,
        folds: int = 10,
        seed: int = 0,
    ) -> dict[str, Any]:
        """Fit sorted-L1 (SLOPE) or LASSO with a fixed or cross-validated penalty."""

        try:
            q = validate_probability(q, "q")
            call = partial(
                service.fit_penalized, csv_path, response, method,
                rule=rule, q=q, c=c, lam=lam, family=family, cv=cv, folds=folds, seed=seed,
            )
            run = await anyio.to_thread.run_sync(call)
            return run.payload
        except Exception as error:  # noqa: BLE001
            raise _handle_error("Falha no ajuste SLOPE/LASSO", error) from error

    @mcp.tool(  # type: ignore[misc]
        name=f"{prefix}knockoff_filter",
        title="Knockoff Filter",
        annotations=ToolAnnotations(readOnlyHint=True),
    )
    async def knockoff_filter(
        csv_path: str,
        response: str,
        q: float = 0.2,
        sigma_path: Optional[str] = None,
        seed: int = 0,
    ) -> dict[str, Any]:
        """Run the model-X knockoff filter with CV-LASSO statistics."""

        try:
            call = partial(service.knockoff, csv_path, response, sigma_path=sigma_path, q=q, seed=seed)
            payload, _ = await anyio.to_thread.run_sync(call)
            return payload
        except Exception as error:  # noqa: BLE001
            raise _handle_error("Falha no filtro knockoff", error) from error

    @mcp.tool(  # type: ignore[misc]
        name=f"{prefix}list_scenarios",
        title="List Simulation Scenarios",
        annotations=ToolAnnotations(readOnlyHint=True),
    )
    async def list_scenarios() -> list[dict[str, Any]]:
        """List the built-in simulation scenarios."""

        try:
            return to_builtin(service.list_scenarios())
        except Exception as error:  # noqa: BLE001
            raise _handle_error("Falha ao listar cenários", error) from error

    @mcp.tool(  # type: ignore[misc]
        name=f"{prefix}run_scenario",
        title="Run Simulation Scenario",
        annotations=ToolAnnotations(idempotentHint=True, destructiveHint=False),
    )
    async def run_scenario(
        scenario: str,
        replicates: Optional[int] = None,
        seed: Optional[int] = None,
        methods: Optional[list[str]] = None,
        output_dir: Optional[str] = None,
    ) -> list[dict[str, Any]]:
        """Run a Monte Carlo scenario and return its long-format summary."""

        try:
            call = partial(
                service.simulate, scenario,
                replicates=replicates, seed=seed, methods=methods, output_dir=output_dir,
            )
            reports = await anyio.to_thread.run_sync(call)
            return [to_builtin(row) for report in reports for row in report.summary.to_dict(orient="records")]
        except Exception as error:  # noqa: BLE001
            raise _handle_error("Falha ao executar cenário", error) from error

    return mcp


__all__ = ["create_mcp_server"]
