"""
Testes unitários para core/service.py
Testa os fluxos de seleção, ajuste penalizado, knockoffs e simulação sobre arquivos
"""

import json

import numpy as np
import pandas as pd
import pytest

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '../../src'))

from sparse_select.core.dataset import Dataset
from sparse_select.core.entities import CriterionSpec
from sparse_select.core.exceptions import DataError
from sparse_select.core.service import estimate_sigma
from sparse_select.utils.serialization import write_json, write_lambda


# ============================================================================
# Testes de critérios
# ============================================================================

class TestSelection:
    """Testes de select_variables e threshold"""

    def test_select_variables(self, service, signal_csv):
        payload = service.select_variables(signal_csv, "y", CriterionSpec(kind="mbic2"))
        assert payload["selected"] == ["x3", "x7"]
        assert payload["n"] == 50 and payload["p"] == 10
        assert payload["coefficients"]["x3"] > 0 > payload["coefficients"]["x7"]

    def test_select_with_textual_plan(self, service, signal_csv):
        payload = service.select_variables(signal_csv, "y", CriterionSpec(kind="bic"), plan="forward:bic,stepwise:bic")
        assert {"x3", "x7"} <= set(payload["selected"])
        stages = [entry["stage"] for entry in payload["trace"] if entry["action"] == "stage"]
        assert stages == ["forward(bic)", "stepwise(bic)"]

    def test_missing_response(self, service, signal_csv):
        with pytest.raises(DataError):
            service.select_variables(signal_csv, "target", CriterionSpec(kind="bic"))

    def test_threshold_keeps_signals(self, service, signal_csv, tmp_path):
        fit_path = write_json(tmp_path / "fit.json", {"selected": ["x1", "x3", "x7"]})
        payload = service.threshold(fit_path, signal_csv, "y", CriterionSpec(kind="mbic2"))
        assert {"x3", "x7"} <= set(payload["selected"]) <= {"x1", "x3", "x7"}
        assert payload["input_selected"] == ["x1", "x3", "x7"]
        assert payload["criterion_value"] <= payload["input_criterion_value"] + 1e-9

    def test_threshold_unknown_column(self, service, signal_csv, tmp_path):
        fit_path = write_json(tmp_path / "fit.json", {"selected": ["x3", "z9"]})
        with pytest.raises(DataError):
            service.threshold(fit_path, signal_csv, "y", CriterionSpec(kind="bic"))


# ============================================================================
# Testes de SLOPE e LASSO
# ============================================================================

class TestPenalized:
    """Testes de fit_penalized"""

    def test_slope_bh(self, service, signal_csv):
        run = service.fit_penalized(signal_csv, "y", "slope", rule="bh", q=0.1)
        assert {"x3", "x7"} <= set(run.payload["selected"])
        assert run.payload["rule"] == "bh"
        assert run.payload["scaling"] == "unit-l2-one"
        assert run.payload["coefficients"]["x3"] > 0

    def test_lasso_requires_lambda(self, service, signal_csv):
        with pytest.raises(ValueError):
            service.fit_penalized(signal_csv, "y", "lasso", rule="constant")

    def test_unscaled_fit_keeps_intercept(self, service, rng, tmp_path):
        """Modo none com X deslocado: intercepto e β iguais aos de mínimos quadrados"""
        X = rng.normal(size=(200, 3)) + 5.0
        y = 10.0 + 2.0 * X[:, 0] + 0.5 * rng.normal(size=200)
        path = tmp_path / "shifted.csv"
        pd.DataFrame({"y": y, "a": X[:, 0], "b": X[:, 1], "c": X[:, 2]}).to_csv(path, index=False)
        A = np.column_stack([np.ones(200), X])
        ols = np.linalg.lstsq(A, y, rcond=None)[0]
        for scaling in ("none", "center"):
            run = service.fit_penalized(path, "y", "lasso", rule="constant", lam=1e-6, scaling=scaling)
            assert run.payload["intercept"] == pytest.approx(ols[0], abs=1e-3)
            assert run.payload["coefficients"]["a"] == pytest.approx(ols[1], abs=1e-4)

    def test_lasso_bonferroni_estimates_sigma(self, service, signal_csv):
        run = service.fit_penalized(signal_csv, "y", "lasso", rule="bonferroni", q=0.1)
        assert run.lam.params["sigma"] > 0
        assert np.all(run.lam.values == run.lam.values[0])

    def test_explicit_lambda_file(self, service, signal_csv, tmp_path):
        lam_path = write_lambda(tmp_path / "lam.csv", np.linspace(2.0, 1.0, 10))
        run = service.fit_penalized(signal_csv, "y", "slope", lambda_path=lam_path)
        assert run.payload["rule"] == "explicit"
        np.testing.assert_allclose(run.lam.values, np.linspace(2.0, 1.0, 10))

    def test_cross_validated(self, service, signal_csv):
        run = service.fit_penalized(signal_csv, "y", "lasso", cv=True, folds=5, seed=3)
        assert run.payload["rule"] == "cv"
        assert run.payload["cv"]["method"] == "lasso"
        assert run.cv is not None

    def test_path(self, service, signal_csv):
        run = service.fit_penalized(signal_csv, "y", "slope", path_scales=[0.5, 2.0, 50.0])
        assert [point["scale"] for point in run.payload["path"]] == [50.0, 2.0, 0.5]

    def test_estimate_sigma(self, rng):
        X = rng.normal(size=(400, 3))
        d = Dataset(y=X @ np.array([1.0, 0.0, -1.0]) + 2.0 * rng.normal(size=400), X=X)
        assert estimate_sigma(d) == pytest.approx(2.0, rel=0.15)
        with pytest.raises(DataError):
            estimate_sigma(Dataset(y=rng.normal(size=4), X=rng.normal(size=(4, 3))))


# ============================================================================
# Testes de knockoffs e simulação
# ============================================================================

class TestKnockoffAndSimulation:
    """Testes de knockoff, list_scenarios e simulate"""

    def test_knockoff_payload(self, service, signal_csv):
        payload, result = service.knockoff(signal_csv, "y", q=0.2, seed=4)
        assert payload["sigma_source"] == "ledoit-wolf"
        assert set(payload["W"]) == {f"x{j}" for j in range(1, 11)}
        assert result.knockoffs.shape == (50, 10)

    def test_knockoff_sigma_dimension(self, service, signal_csv, tmp_path):
        sigma_path = tmp_path / "sigma.csv"
        pd.DataFrame(np.eye(3)).to_csv(sigma_path, index=False)
        with pytest.raises(DataError):
            service.knockoff(signal_csv, "y", sigma_path=sigma_path)

    def test_list_scenarios(self, service):
        rows = {row["name"]: row for row in service.list_scenarios()}
        assert rows["scenario0"]["k"] == 0
        assert rows["block-correlation"]["p"] == 256

    def test_simulate_from_file(self, service, tmp_path):
        path = tmp_path / "custom.json"
        path.write_text(json.dumps({
            "name": "custom", "n": 40,
            "p_rule": {"kind": "constant", "value": 8},
            "k_rule": {"kind": "constant", "value": 2},
            "effect": {"kind": "constant", "value": 2.0},
            "replicates": 2, "methods": ["oracle", "bic"],
        }))
        [report] = service.simulate(str(path), seed=3)
        assert set(report.methods) == {"oracle", "bic"}
        assert (tmp_path / "results" / "custom_summary.csv").is_file()
