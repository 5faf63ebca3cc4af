"""
Testes unitários para core/dataset.py
Testa Dataset, leitura de CSV, padronização e geração aleatória determinística
"""

import numpy as np
import pytest

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '../../src'))

from sparse_select.core.dataset import (
    LANE_DESIGN,
    LANE_METHOD,
    LANE_NOISE,
    Dataset,
    RngStream,
    draw_gaussian_design,
    load_csv,
    standardize,
)
from sparse_select.core.entities import DesignSpec, Family, ScalingMode
from sparse_select.core.exceptions import DataError


# ============================================================================
# Testes do Dataset
# ============================================================================

class TestDataset:
    """Testes de construção e invariantes do Dataset"""

    def test_default_names(self):
        d = Dataset(y=[1.0, 2.0, 3.0], X=np.eye(3))
        assert d.names == ("x1", "x2", "x3")
        assert (d.n, d.p) == (3, 3)

    def test_arrays_are_read_only(self):
        d = Dataset(y=[1.0, 2.0], X=[[1.0], [2.0]])
        with pytest.raises(ValueError):
            d.X[0, 0] = 5.0

    def test_rejects_non_finite(self):
        with pytest.raises(DataError):
            Dataset(y=[1.0, np.nan], X=[[1.0], [2.0]])

    def test_rejects_shape_mismatch(self):
        with pytest.raises(DataError):
            Dataset(y=[1.0, 2.0, 3.0], X=[[1.0], [2.0]])

    def test_rejects_single_row(self):
        with pytest.raises(DataError):
            Dataset(y=[1.0], X=[[1.0]])

    def test_binomial_response(self):
        with pytest.raises(DataError, match="invalid-binary-response"):
            Dataset(y=[0.0, 2.0], X=[[1.0], [2.0]], family="binomial")

    def test_subset_keeps_names(self):
        d = Dataset(y=[1.0, 2.0, 3.0], X=np.arange(9.0).reshape(3, 3), names=("a", "b", "c"))
        sub = d.subset([2, 0])
        assert sub.names == ("c", "a")
        np.testing.assert_array_equal(sub.X[:, 0], d.X[:, 2])


# ============================================================================
# Testes de leitura de CSV
# ============================================================================

class TestLoadCsv:
    """Testes de load_csv"""

    def test_parses_header(self, tiny_csv):
        """Arquivo 3×3 com cabeçalho y,a,b"""
        d = load_csv(tiny_csv, "y")
        assert (d.n, d.p) == (3, 2)
        assert d.names == ("a", "b")
        np.testing.assert_array_equal(d.y, [1.0, 2.0, 3.0])

    def test_missing_column(self, tiny_csv):
        with pytest.raises(DataError, match="missing-column"):
            load_csv(tiny_csv, "z")

    def test_invalid_binary_response(self, tmp_path):
        path = tmp_path / "bin.csv"
        path.write_text("y,a\n0,1\n2,0\n1,3\n")
        with pytest.raises(DataError, match="invalid-binary-response"):
            load_csv(path, "y", "binomial")

    def test_non_numeric_cell(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("y,a\n1,0\n2,abc\n")
        with pytest.raises(DataError, match="non-numeric-cell"):
            load_csv(path, "y")

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError):
            load_csv(tmp_path / "nada.csv", "y")


# ============================================================================
# Testes de padronização
# ============================================================================

class TestStandardize:
    """Testes de standardize e do retorno à escala original"""

    def test_constant_column(self):
        d = Dataset(y=[1.0, 2.0, 3.0, 4.0], X=[[1.0], [1.0], [1.0], [1.0]])
        with pytest.raises(DataError, match="constant-column"):
            standardize(d, "unit-l2")

    def test_unit_l2_fixed_point(self):
        """Coluna (1,-1,1,-1) já tem Σx² = n"""
        d = Dataset(y=[1.0, 2.0, 3.0, 4.0], X=[[1.0], [-1.0], [1.0], [-1.0]])
        std, _ = standardize(d, "unit-l2")
        np.testing.assert_allclose(std.X[:, 0], [1.0, -1.0, 1.0, -1.0])

    def test_unit_l2_sum_of_squares(self):
        d = Dataset(y=[1.0, 2.0, 3.0, 4.0], X=[[2.0], [0.0], [0.0], [0.0]])
        std, _ = standardize(d, "unit-l2")
        assert float(np.sum(std.X[:, 0] ** 2)) == pytest.approx(4.0)
        assert float(std.X[:, 0].mean()) == pytest.approx(0.0, abs=1e-12)

    def test_unit_l2_one_norm(self, signal_dataset):
        d, _ = signal_dataset
        std, _ = standardize(d, ScalingMode.UNIT_L2_ONE)
        np.testing.assert_allclose(np.linalg.norm(std.X, axis=0), 1.0)
        assert float(std.y.mean()) == pytest.approx(0.0, abs=1e-12)

    def test_back_transform_reproduces_fitted_values(self, rng):
        """Valores ajustados na escala original coincidem até 1e-10 relativo"""
        X = rng.normal(3.0, 2.0, size=(30, 4))
        d = Dataset(y=rng.normal(size=30), X=X)
        std, info = standardize(d, "unit-l2")
        beta_std = np.array([0.5, -1.0, 0.0, 2.0])
        intercept, beta = info.coefficients_to_original(beta_std)
        fitted_std = std.X @ beta_std + info.y_mean
        fitted = X @ beta + intercept
        np.testing.assert_allclose(fitted, fitted_std, rtol=1e-10)

    def test_none_mode_centres_gaussian(self, rng):
        """Modo none não escala, mas centraliza y e X na família gaussiana"""
        X = rng.normal(5.0, 2.0, size=(40, 3))
        d = Dataset(y=10.0 + rng.normal(size=40), X=X)
        std, info = standardize(d, "none")
        np.testing.assert_array_equal(info.scales, np.ones(3))
        np.testing.assert_allclose(std.X, X - X.mean(axis=0))
        np.testing.assert_allclose(info.means, X.mean(axis=0))
        assert info.y_mean == pytest.approx(float(d.y.mean()))
        assert float(std.y.mean()) == pytest.approx(0.0, abs=1e-12)

    def test_none_mode_binomial_is_identity(self):
        d = Dataset(y=[0.0, 1.0, 1.0, 0.0], X=[[1.0], [2.0], [3.0], [5.0]], family=Family.BINOMIAL)
        std, info = standardize(d, "none")
        assert std is d
        np.testing.assert_array_equal(info.means, np.zeros(1))

    def test_binomial_keeps_response(self):
        d = Dataset(y=[0.0, 1.0, 1.0, 0.0], X=[[1.0], [2.0], [3.0], [5.0]], family=Family.BINOMIAL)
        std, info = standardize(d, "center")
        np.testing.assert_array_equal(std.y, d.y)
        assert info.y_mean == 0.0


# ============================================================================
# Testes de geração aleatória
# ============================================================================

class TestRngStream:
    """Testes de RngStream e draw_gaussian_design"""

    def test_same_seed_same_draws(self):
        a = RngStream(5, 3).generator(LANE_NOISE).standard_normal(10)
        b = RngStream(5, 3).generator(LANE_NOISE).standard_normal(10)
        np.testing.assert_array_equal(a, b)

    def test_lanes_are_independent(self):
        stream = RngStream(5, 3)
        a = stream.generator(LANE_DESIGN).standard_normal(10)
        b = stream.generator(LANE_NOISE).standard_normal(10)
        assert not np.allclose(a, b)

    def test_order_does_not_matter(self):
        """Sortear um canal antes de outro não altera nenhum dos dois"""
        first = RngStream(9, 1)
        noise_first = first.generator(LANE_NOISE).standard_normal(5)
        design_second = first.generator(LANE_DESIGN).standard_normal(5)
        second = RngStream(9, 1)
        design_first = second.generator(LANE_DESIGN).standard_normal(5)
        noise_second = second.generator(LANE_NOISE).standard_normal(5)
        np.testing.assert_array_equal(noise_first, noise_second)
        np.testing.assert_array_equal(design_first, design_second)

    def test_tag_subchannels(self):
        stream = RngStream(1)
        a = stream.generator(LANE_METHOD, 1).standard_normal(4)
        b = stream.generator(LANE_METHOD, 2).standard_normal(4)
        assert not np.allclose(a, b)

    def test_negative_seed(self):
        with pytest.raises(ValueError):
            RngStream(-1)

    def test_rho_zero_equals_identity(self):
        a = draw_gaussian_design(20, 5, DesignSpec(), 1.0, RngStream(3))
        b = draw_gaussian_design(20, 5, DesignSpec(kind="compound-symmetry", rho=0.0), 1.0, RngStream(3))
        np.testing.assert_array_equal(a, b)

    def test_identity_moments(self):
        """Médias próximas de 0 e variâncias próximas de 1 com n = 2000"""
        X = draw_gaussian_design(2000, 5, DesignSpec(), 1.0, RngStream(11))
        assert np.all(np.abs(X.mean(axis=0)) < 4.0 / np.sqrt(2000))
        assert np.all(np.abs(X.var(axis=0) - 1.0) < 0.2)

    def test_compound_symmetry_correlation(self):
        X = draw_gaussian_design(5000, 4, DesignSpec(kind="compound-symmetry", rho=0.5), 1.0, RngStream(2))
        corr = np.corrcoef(X, rowvar=False)
        off = corr[~np.eye(4, dtype=bool)]
        assert np.all(np.abs(off - 0.5) < 0.05)

    def test_row_scale(self):
        X = draw_gaussian_design(10, 3, DesignSpec(), 0.5, RngStream(4))
        Z = draw_gaussian_design(10, 3, DesignSpec(), 1.0, RngStream(4))
        np.testing.assert_allclose(X, 0.5 * Z)
        with pytest.raises(ValueError):
            draw_gaussian_design(10, 3, DesignSpec(), 0.0, RngStream(4))
