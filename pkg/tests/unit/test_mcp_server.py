"""
Testes unitários para server/mcp_server.py
Testa o registro das tools e o encaminhamento para o serviço (mockado)
"""

import json
from unittest.mock import Mock

import anyio
import pytest
from mcp.server.fastmcp.exceptions import ToolError

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '../../src'))

from sparse_select.core.exceptions import DataError
from sparse_select.server.mcp_server import create_mcp_server


def _call(server, name, arguments):
    """Executa uma tool e devolve os blocos de texto decodificados"""
    result = anyio.run(server.call_tool, name, arguments)
    content = result[0] if isinstance(result, tuple) else result
    return [json.loads(block.text) for block in content]


@pytest.fixture
def mock_service():
    """Serviço com respostas fixas"""
    service = Mock()
    service.select_variables = Mock(return_value={"selected": ["x3", "x7"], "criterion": "mbic2"})
    service.fit_penalized = Mock(return_value=Mock(payload={"selected": ["x3"], "method": "slope"}))
    service.knockoff = Mock(return_value=({"selected": [], "threshold": None}, None))
    service.list_scenarios = Mock(return_value=[{"name": "scenario0", "k": 0}])
    return service


# ============================================================================
# Testes de registro
# ============================================================================

class TestToolRegistration:
    """Testes dos nomes das tools"""

    def test_tool_names(self, mock_service):
        server = create_mcp_server(mock_service)
        names = {tool.name for tool in anyio.run(server.list_tools)}
        assert names == {"select_variables", "fit_slope", "knockoff_filter", "list_scenarios", "run_scenario"}

    def test_namespace_prefix(self, mock_service):
        server = create_mcp_server(mock_service, namespace="stats")
        names = {tool.name for tool in anyio.run(server.list_tools)}
        assert "stats_select_variables" in names


# ============================================================================
# Testes das chamadas
# ============================================================================

class TestToolCalls:
    """Testes do encaminhamento das tools"""

    def test_select_variables(self, mock_service):
        server = create_mcp_server(mock_service)
        [payload] = _call(server, "select_variables", {"csv_path": "data.csv", "response": "y"})
        assert payload["selected"] == ["x3", "x7"]
        args, kwargs = mock_service.select_variables.call_args
        assert args[0] == "data.csv" and args[1] == "y"
        assert args[2].kind.value == "mbic2"
        assert kwargs == {"family": "gaussian", "plan": None}

    def test_fit_slope(self, mock_service):
        server = create_mcp_server(mock_service)
        [payload] = _call(server, "fit_slope", {"csv_path": "data.csv", "response": "y", "q": 0.1})
        assert payload["method"] == "slope"
        assert mock_service.fit_penalized.call_args.kwargs["q"] == 0.1

    def test_invalid_q_is_tool_error(self, mock_service):
        server = create_mcp_server(mock_service)
        with pytest.raises(ToolError):
            _call(server, "fit_slope", {"csv_path": "data.csv", "response": "y", "q": 1.5})
        mock_service.fit_penalized.assert_not_called()

    def test_service_error_is_tool_error(self, mock_service):
        mock_service.select_variables.side_effect = DataError("missing-column: y")
        server = create_mcp_server(mock_service)
        with pytest.raises(ToolError, match="missing-column"):
            _call(server, "select_variables", {"csv_path": "data.csv", "response": "y"})

    def test_unknown_criterion_is_tool_error(self, mock_service):
        server = create_mcp_server(mock_service)
        with pytest.raises(ToolError):
            _call(server, "select_variables", {"csv_path": "data.csv", "response": "y", "criterion": "xyz"})

    def test_list_scenarios(self, mock_service):
        server = create_mcp_server(mock_service)
        assert _call(server, "list_scenarios", {}) == [{"name": "scenario0", "k": 0}]

    def test_knockoff(self, mock_service):
        server = create_mcp_server(mock_service)
        [payload] = _call(server, "knockoff_filter", {"csv_path": "data.csv", "response": "y", "seed": 3})
        assert payload["selected"] == []
        assert mock_service.knockoff.call_args.kwargs["seed"] == 3
