"""
Testes unitários para cli.py
Executa os subcomandos com o CliRunner do Typer
"""

import json
import logging

import pandas as pd
import pytest
from typer.testing import CliRunner

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '../../src'))

from sparse_select.cli import EXIT_DATA_ERROR, EXIT_FIT_ERROR, app
from sparse_select.core.exceptions import FitError
from sparse_select.core.service import SelectionService


@pytest.fixture
def runner(clean_env):
    """CliRunner com ambiente limpo; remove os handlers instalados pela CLI"""
    yield CliRunner()
    root = logging.getLogger()
    for handler in [h for h in root.handlers if getattr(h, "_sparse_select_handler", False)]:
        root.removeHandler(handler)


# ============================================================================
# Testes de seleção por critério
# ============================================================================

class TestSelectCommand:
    """Testes dos subcomandos select e threshold"""

    def test_select_writes_files(self, runner, signal_csv, tmp_path):
        out = tmp_path / "sel"
        result = runner.invoke(app, ["select", str(signal_csv), "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert "x3, x7" in result.stdout
        selection = json.loads((out / "selection.json").read_text())
        assert selection["selected"] == ["x3", "x7"]
        coefficients = pd.read_csv(out / "coefficients.csv")
        assert coefficients["variable"].tolist() == ["(intercept)", "x3", "x7"]

    def test_missing_column_exit_code(self, runner, signal_csv, tmp_path):
        result = runner.invoke(app, ["select", str(signal_csv), "--response", "nope", "--out", str(tmp_path)])
        assert result.exit_code == EXIT_DATA_ERROR

    def test_missing_file_exit_code(self, runner, tmp_path):
        result = runner.invoke(app, ["select", str(tmp_path / "none.csv"), "--out", str(tmp_path)])
        assert result.exit_code == EXIT_DATA_ERROR

    def test_fit_error_exit_code(self, runner, signal_csv, tmp_path, monkeypatch):
        def failing(self, *args, **kwargs):
            raise FitError("não convergiu")
        monkeypatch.setattr(SelectionService, "select_variables", failing)
        result = runner.invoke(app, ["select", str(signal_csv), "--out", str(tmp_path)])
        assert result.exit_code == EXIT_FIT_ERROR

    def test_threshold(self, runner, signal_csv, tmp_path):
        fit = tmp_path / "fit.json"
        fit.write_text(json.dumps({"selected": ["x1", "x3", "x7"]}))
        out = tmp_path / "thr"
        result = runner.invoke(app, ["threshold", str(fit), str(signal_csv), "--out", str(out)])
        assert result.exit_code == 0, result.output
        selected = json.loads((out / "selection.json").read_text())["selected"]
        assert {"x3", "x7"} <= set(selected)

    def test_threshold_forwards_criterion_constants(self, runner, signal_csv, tmp_path, monkeypatch):
        captured = {}

        def recording(self, fit, data, response, spec, **kwargs):
            captured["spec"] = spec
            raise FitError("interrompido")
        monkeypatch.setattr(SelectionService, "threshold", recording)
        fit = tmp_path / "fit.json"
        fit.write_text(json.dumps({"selected": ["x3"]}))
        result = runner.invoke(app, ["threshold", str(fit), str(signal_csv), "--criterion", "maic",
                                     "--const", "0.1", "--kappa", "0.8", "--sigma", "2.0", "--p-total", "100",
                                     "--out", str(tmp_path)])
        assert result.exit_code == EXIT_FIT_ERROR
        spec = captured["spec"]
        assert spec.kind.value == "maic"
        assert (spec.const, spec.kappa, spec.sigma, spec.p_total) == (0.1, 0.8, 2.0, 100)


# ============================================================================
# Testes de SLOPE, LASSO e knockoffs
# ============================================================================

class TestPenalizedCommands:
    """Testes dos subcomandos slope, lasso e knockoff"""

    def test_slope_outputs(self, runner, signal_csv, tmp_path):
        out = tmp_path / "slope"
        result = runner.invoke(app, ["slope", str(signal_csv), "--q", "0.1", "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert (out / "fit.json").is_file()
        assert len(pd.read_csv(out / "lambda.csv")) == 10

    def test_slope_path(self, runner, signal_csv, tmp_path):
        out = tmp_path / "path"
        result = runner.invoke(app, ["slope", str(signal_csv), "--path", "2", "--path", "0.5", "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert pd.read_csv(out / "path.csv")["scale"].tolist() == [2.0, 0.5]

    def test_lasso_requires_lambda(self, runner, signal_csv, tmp_path):
        result = runner.invoke(app, ["lasso", str(signal_csv), "--out", str(tmp_path)])
        assert result.exit_code == 2

    def test_lasso_cv(self, runner, signal_csv, tmp_path):
        out = tmp_path / "lasso"
        result = runner.invoke(app, ["lasso", str(signal_csv), "--cv", "--folds", "5", "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert {"lambda", "mean_error", "se"} <= set(pd.read_csv(out / "cv.csv").columns)

    def test_knockoff(self, runner, signal_csv, tmp_path):
        out = tmp_path / "ko"
        result = runner.invoke(app, ["knockoff", str(signal_csv), "--folds", "5", "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert len(pd.read_csv(out / "W.csv")) == 10


# ============================================================================
# Testes de simulação e demo
# ============================================================================

class TestSimulationCommands:
    """Testes dos subcomandos simulate e demo"""

    def test_list(self, runner):
        result = runner.invoke(app, ["simulate", "--list"])
        assert result.exit_code == 0, result.output
        names = {row["name"] for row in json.loads(result.stdout)}
        assert {"scenario0", "scenario3", "block-correlation"} <= names

    def test_scenario_required(self, runner):
        assert runner.invoke(app, ["simulate"]).exit_code == 2

    def test_unknown_scenario(self, runner):
        assert runner.invoke(app, ["simulate", "nowhere"]).exit_code == EXIT_DATA_ERROR

    def test_small_run(self, runner, tmp_path):
        out = tmp_path / "sim"
        result = runner.invoke(app, ["simulate", "scenario1", "--replicates", "2", "--n", "49",
                                     "-m", "oracle", "-m", "bic", "--jobs", "1", "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert (out / "scenario1_records.csv").is_file()
        assert len(pd.read_csv(out / "scenario1_records.csv")) == 4

    def test_demo(self, runner, tmp_path):
        result = runner.invoke(app, ["demo", "--out", str(tmp_path)])
        assert result.exit_code == 0, result.output
        for name in ("signal", "noise", "binary"):
            assert (tmp_path / f"demo_{name}.csv").is_file()
