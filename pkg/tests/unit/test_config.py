"""
Testes unitários para core/config.py e core/entities.py
Testa leitura de variáveis de ambiente e validação dos modelos pydantic
"""

import pytest
from pydantic import ValidationError

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '../../src'))

from sparse_select.core.config import SearchConfig, ServerConfig, SimulationConfig, SolverConfig
from sparse_select.core.entities import (
    BlockSpec,
    CriterionKind,
    CriterionSpec,
    CvSpec,
    DesignSpec,
    SearchPlan,
    SearchStage,
    StageKind,
)


# ============================================================================
# Testes das configurações por ambiente
# ============================================================================

class TestConfigFromEnv:
    """Testes dos construtores from_env"""

    def test_defaults_without_env(self, clean_env):
        """Sem variáveis de ambiente valem os padrões"""
        assert SolverConfig.from_env() == SolverConfig()
        assert SearchConfig.from_env() == SearchConfig()
        assert SimulationConfig.from_env() == SimulationConfig()
        assert ServerConfig.from_env() == ServerConfig()

    def test_solver_overrides(self, clean_env):
        """Variáveis do solver são lidas com o tipo correto"""
        clean_env.setenv("SPARSE_SELECT_SOLVER_MAX_ITER", "123")
        clean_env.setenv("SPARSE_SELECT_SOLVER_TOL", "1e-5")
        clean_env.setenv("SPARSE_SELECT_SOLVER_MONOTONE", "false")
        config = SolverConfig.from_env()
        assert config.max_iter == 123
        assert config.tol == 1e-5
        assert config.monotone is False

    def test_simulation_overrides(self, clean_env):
        """Semente, réplicas e diretório de saída"""
        clean_env.setenv("SPARSE_SELECT_SEED", "42")
        clean_env.setenv("SPARSE_SELECT_REPLICATES", "7")
        clean_env.setenv("SPARSE_SELECT_OUTPUT_DIR", "/tmp/out")
        config = SimulationConfig.from_env()
        assert (config.seed, config.replicates, config.output_dir) == (42, 7, "/tmp/out")

    def test_negative_seed_rejected(self, clean_env):
        """Semente negativa é erro de configuração"""
        clean_env.setenv("SPARSE_SELECT_SEED", "-1")
        with pytest.raises(ValueError, match="SPARSE_SELECT_SEED"):
            SimulationConfig.from_env()

    def test_invalid_integer_names_variable(self, clean_env):
        """Mensagem de erro cita a variável com valor inválido"""
        clean_env.setenv("SPARSE_SELECT_SOLVER_MAX_ITER", "muitas")
        with pytest.raises(ValueError, match="SPARSE_SELECT_SOLVER_MAX_ITER"):
            SolverConfig.from_env()

    def test_server_config(self, clean_env):
        """Configuração do servidor MCP"""
        clean_env.setenv("MCP_NAMESPACE", "stats")
        clean_env.setenv("MCP_TRANSPORT", "http")
        clean_env.setenv("MCP_PORT", "9000")
        config = ServerConfig.from_env()
        assert (config.namespace, config.transport, config.port) == ("stats", "http", 9000)

    def test_search_max_size(self, clean_env):
        """Tamanho máximo opcional do modelo"""
        assert SearchConfig.from_env().max_size is None
        clean_env.setenv("SPARSE_SELECT_SEARCH_MAX_SIZE", "12")
        assert SearchConfig.from_env().max_size == 12


# ============================================================================
# Testes dos modelos de especificação
# ============================================================================

class TestCriterionSpec:
    """Testes de CriterionSpec"""

    def test_kind_is_case_insensitive(self):
        assert CriterionSpec(kind="MBIC2").kind == CriterionKind.MBIC2

    def test_resolve_fills_p_total(self):
        spec = CriterionSpec(kind="bic")
        assert spec.resolve(30).p_total == 30
        assert CriterionSpec(kind="bic", p_total=5).resolve(30).p_total == 5

    def test_with_kind_keeps_constants(self):
        spec = CriterionSpec(kind="mbic", E=2.0, sigma=1.5).with_kind("bic")
        assert spec.kind == CriterionKind.BIC
        assert (spec.E, spec.sigma) == (2.0, 1.5)

    def test_with_kind_accepts_enum_member(self):
        spec = CriterionSpec(kind="maic", const=0.25).with_kind(CriterionKind.BIC)
        assert spec.kind == CriterionKind.BIC
        assert spec.const == 0.25
        assert CriterionSpec(kind="bic").with_kind(" MBIC2 ").kind == CriterionKind.MBIC2

    def test_invalid_constants(self):
        with pytest.raises(ValidationError):
            CriterionSpec(kind="mbic", E=0.0)
        with pytest.raises(ValidationError):
            CriterionSpec(kind="ebic", kappa=1.5)
        with pytest.raises(ValidationError):
            CriterionSpec(kind="desconhecido")


class TestSearchPlan:
    """Testes de SearchPlan e SearchStage"""

    def test_default_plan(self):
        """Triagem, forward BIC, backward e stepwise no critério"""
        plan = SearchPlan.default(CriterionSpec(kind="mbic2"))
        assert [s.label for s in plan.stages] == [
            "screen(0.15)", "forward(bic)", "backward(mbic2)", "stepwise(mbic2)",
        ]

    def test_escape_plan(self):
        plan = SearchPlan.escape(CriterionSpec(kind="mbic2"), steps=2)
        assert [s.label for s in plan.stages] == [
            "stepwise(mbic2)", "forward-steps(bic,2)", "stepwise(mbic2)",
        ]

    def test_parse_forward_steps(self):
        plan = SearchPlan.parse("stepwise:mbic2, forward-steps:bic:3", CriterionSpec(kind="mbic2", E=2.0))
        assert plan.stages[1].kind == StageKind.FORWARD_STEPS
        assert plan.stages[1].count == 3
        assert plan.stages[1].criterion.E == 2.0

    def test_parse_rejects_malformed(self):
        with pytest.raises(ValueError):
            SearchPlan.parse("screen", CriterionSpec(kind="bic"))
        with pytest.raises(ValueError):
            SearchPlan.parse("forward-steps:bic", CriterionSpec(kind="bic"))

    def test_stage_requires_payload(self):
        with pytest.raises(ValidationError):
            SearchStage(kind=StageKind.SCREEN)
        with pytest.raises(ValidationError):
            SearchStage(kind=StageKind.FORWARD)
        with pytest.raises(ValidationError):
            SearchStage(kind=StageKind.SCREEN, threshold=1.5)


class TestDesignSpec:
    """Testes de DesignSpec e BlockSpec"""

    def test_correlated_blocks_dimensions(self):
        """4·32 + 4·16 + 4·8 + 4·4 + 16 = 256 colunas, 28 causais"""
        blocks = BlockSpec.correlated_blocks()
        assert blocks.p == 256
        assert blocks.k == 28
        assert len(blocks.causal_indices()) == 28
        assert blocks.causal_indices()[:3] == [0, 1, 2]

    def test_block_covariance(self):
        blocks = BlockSpec(block_sizes=[2, 3], causal_per_block=[1, 1], independent=1)
        sigma = DesignSpec(kind="block", rho=0.4, blocks=blocks).covariance(6)
        assert sigma[0, 1] == pytest.approx(0.4)
        assert sigma[1, 2] == 0.0
        assert sigma[2, 4] == pytest.approx(0.4)
        assert sigma[5, 4] == 0.0
        assert all(sigma[j, j] == 1.0 for j in range(6))

    def test_block_requires_structure(self):
        with pytest.raises(ValidationError):
            DesignSpec(kind="block", rho=0.2)

    def test_block_dimension_mismatch(self):
        blocks = BlockSpec(block_sizes=[2], causal_per_block=[1])
        with pytest.raises(ValueError):
            DesignSpec(kind="block", blocks=blocks).covariance(5)

    def test_rho_zero_is_identity(self):
        assert DesignSpec(kind="compound-symmetry", rho=0.0).is_identity


class TestCvSpec:
    """Testes de CvSpec"""

    def test_defaults(self):
        spec = CvSpec()
        assert (spec.folds, spec.grid, spec.one_se, spec.grid_size) == (10, None, False, 100)

    def test_empty_grid_rejected(self):
        with pytest.raises(ValidationError):
            CvSpec(grid=[])

    def test_single_fold_rejected(self):
        with pytest.raises(ValidationError):
            CvSpec(folds=1)
