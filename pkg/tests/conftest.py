"""
Configuração global de fixtures para testes pytest
Fornece conjuntos de dados determinísticos, arquivos CSV e serviços reutilizáveis
"""

import os
import sys

import numpy as np
import pytest
from scipy.linalg import hadamard

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '../src'))

from sparse_select.core.config import SearchConfig, SimulationConfig, SolverConfig
from sparse_select.core.dataset import Dataset
from sparse_select.core.service import SelectionService
from sparse_select.simulation.fixtures import demo_dataset, noise_dataset, to_frame


# ============================================================================
# Fixtures de Dados
# ============================================================================

@pytest.fixture
def rng():
    """Gerador numpy com semente fixa"""
    return np.random.default_rng(12345)


@pytest.fixture
def orthogonal_design():
    """Matriz de Hadamard 64×64 sem a coluna constante: X'X = nI, colunas centradas"""
    H = hadamard(64).astype(float)
    return H[:, 1:17]


@pytest.fixture
def orthogonal_dataset(orthogonal_design):
    """Dados sob desenho ortogonal com Z_j controlados e σ = 1 conhecido"""
    n = orthogonal_design.shape[0]
    z = np.array([6.0, -4.0, 3.0, 2.5, 1.8, -1.2, 0.9, 0.5, 0.3, -0.2, 0.1, 0.0, 2.2, -1.6, 1.1, 0.05])
    beta_hat = z / np.sqrt(n)
    y = orthogonal_design @ beta_hat
    return Dataset(y=y, X=orthogonal_design), z


@pytest.fixture
def signal_dataset():
    """Demo com dois sinais fortes nas colunas x3 e x7"""
    d, beta = demo_dataset()
    return d, beta


@pytest.fixture
def pure_noise_dataset():
    """Resposta independente das colunas"""
    return noise_dataset(7)


@pytest.fixture
def signal_csv(tmp_path, signal_dataset):
    """CSV do demo com sinais"""
    d, _ = signal_dataset
    path = tmp_path / "signal.csv"
    to_frame(d).to_csv(path, index=False)
    return path


@pytest.fixture
def binary_csv(tmp_path):
    """CSV com resposta binária e dois sinais"""
    d, _ = demo_dataset(11, n=200, family="binomial", signals={0: 1.5, 4: -1.5})
    path = tmp_path / "binary.csv"
    to_frame(d).to_csv(path, index=False)
    return path


@pytest.fixture
def tiny_csv(tmp_path):
    """CSV 3×3 com cabeçalho y,a,b"""
    path = tmp_path / "tiny.csv"
    path.write_text("y,a,b\n1,0,0\n2,1,0\n3,0,1\n")
    return path


# ============================================================================
# Fixtures de Configuração
# ============================================================================

@pytest.fixture
def solver_config():
    """Solver com tolerância apertada para comparações numéricas"""
    return SolverConfig(max_iter=20000, tol=1e-12, kkt_tol=1e-8)


@pytest.fixture
def search_config():
    """Busca sequencial"""
    return SearchConfig(n_jobs=1)


@pytest.fixture
def service(tmp_path):
    """Serviço com simulação sequencial gravando em tmp_path"""
    return SelectionService(
        SearchConfig(),
        SolverConfig(),
        SimulationConfig(seed=1, n_jobs=1, output_dir=str(tmp_path / "results")),
    )


@pytest.fixture
def clean_env(monkeypatch):
    """Remove variáveis de ambiente do pacote"""
    for key in list(os.environ):
        if key.startswith("SPARSE_SELECT_") or key.startswith("MCP_"):
            monkeypatch.delenv(key, raising=False)
    return monkeypatch


# ============================================================================
# Configuração do Pytest
# ============================================================================

def pytest_configure(config):
    """Configuração customizada do pytest"""
    config.addinivalue_line(
        "markers", "slow: estudos Monte Carlo e oráculos caros"
    )
    config.addinivalue_line(
        "markers", "acceptance: critérios de aceitação numéricos"
    )
