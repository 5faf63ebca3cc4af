"""
Testes unitários para utils/formatting.py
"""

import numpy as np

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '../../src'))

from sparse_select.core.entities import CriterionKind, CriterionSpec
from sparse_select.search.stepwise import stepwise
from sparse_select.utils.formatting import (
    fit_result_dict,
    format_namespace,
    format_selection_summary,
    to_builtin,
)


class TestFormatting:
    """Testes de formatação"""

    def test_format_namespace(self):
        assert format_namespace("") == ""
        assert format_namespace("stats") == "stats_"

    def test_to_builtin(self):
        value = to_builtin({"a": np.array([1.0, np.nan]), "b": {3, 1}, "c": CriterionKind.BIC, "d": np.bool_(True)})
        assert value == {"a": [1.0, None], "b": [1, 3], "c": "bic", "d": True}

    def test_enum_keys(self):
        assert to_builtin({CriterionKind.MBIC: 1}) == {"mbic": 1}

    def test_selection_summary(self):
        assert format_selection_summary(["x3", "x7"], "mbic2") == "mbic2: 2 variáveis (x3, x7)"
        assert format_selection_summary([], "bic") == "bic: nenhuma variável selecionada"

    def test_fit_result_dict(self, signal_dataset):
        d, _ = signal_dataset
        result = stepwise(d, CriterionSpec(kind="mbic2"), (2, 6))
        payload = fit_result_dict(result, d.names)
        assert payload["criterion"] == "mbic2"
        assert payload["selected"] == ["x3", "x7"]
        assert set(payload["coefficients"]) == {"x3", "x7"}
        assert payload["trace"][0]["action"] == "stage"
