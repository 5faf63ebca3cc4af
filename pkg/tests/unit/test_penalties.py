"""
Testes unitários para criteria/penalties.py
Testa as penalidades L0, limiares ortogonais e cotas da cauda normal
"""

import math

import pytest
from scipy.special import erfc

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '../../src'))

from sparse_select.core.entities import CriterionKind, CriterionSpec
from sparse_select.criteria.penalties import (
    abdj_penalty,
    bh_penalty,
    log_binomial,
    normal_tail_bounds,
    orthogonal_threshold,
    penalty,
)


def _spec(kind, p=1000, **kwargs):
    return CriterionSpec(kind=kind, p_total=p, **kwargs)


# ============================================================================
# Testes das penalidades
# ============================================================================

class TestPenalty:
    """Testes de penalty"""

    @pytest.mark.parametrize("kind", list(CriterionKind))
    def test_empty_model_is_free(self, kind):
        assert penalty(_spec(kind), 0, 100) == 0.0

    def test_bic_single_variable(self):
        """BIC com k=1 e n=8 vale log 8"""
        assert penalty(_spec("bic"), 1, 8) == pytest.approx(math.log(8), abs=1e-12)
        assert penalty(_spec("bic"), 1, 8) == pytest.approx(2.079, abs=1e-3)

    def test_mbic_example(self):
        """2 log 100 + 4 log 250"""
        value = penalty(_spec("mbic", E=4.0), 2, 100)
        assert value == pytest.approx(2 * math.log(100) + 4 * math.log(250), abs=1e-12)
        assert value == pytest.approx(31.2962, abs=1e-4)

    def test_mbic2_factorial_correction(self):
        """mBIC2 - mBIC em k=3 vale -2 log 3!"""
        diff = penalty(_spec("mbic2"), 3, 100) - penalty(_spec("mbic"), 3, 100)
        assert diff == pytest.approx(-2 * math.log(6), abs=1e-12)
        assert diff == pytest.approx(-3.5835, abs=1e-4)

    def test_maic_with_const_e_matches_ric(self):
        """mAIC com const = e coincide com o RIC"""
        maic = penalty(_spec("maic", const=math.e), 4, 50)
        assert maic == pytest.approx(penalty(_spec("ric"), 4, 50), rel=1e-12)

    def test_ebic_kappa_one_is_bic(self):
        assert penalty(_spec("ebic", kappa=1.0), 5, 200) == pytest.approx(penalty(_spec("bic"), 5, 200))

    def test_finite_over_valid_range(self):
        n, p = 30, 40
        for kind in CriterionKind:
            for k in range(0, min(n - 2, p) + 1):
                assert math.isfinite(penalty(_spec(kind, p=p), k, n))

    def test_negative_k(self):
        with pytest.raises(ValueError):
            penalty(_spec("aic"), -1, 10)

    def test_missing_p_total(self):
        with pytest.raises(ValueError, match="p_total"):
            penalty(CriterionSpec(kind="mbic"), 1, 10)


class TestOrthogonalThreshold:
    """Limiares |Z_j| sob X'X = nI"""

    def test_aic(self):
        assert orthogonal_threshold(_spec("aic"), 100) == pytest.approx(math.sqrt(2))

    def test_bic(self):
        assert orthogonal_threshold(_spec("bic"), 100) == pytest.approx(math.sqrt(math.log(100)))

    def test_ric(self):
        assert orthogonal_threshold(_spec("ric", p=64), 100) == pytest.approx(math.sqrt(2 * math.log(64)))

    def test_mbic2_has_no_fixed_threshold(self):
        with pytest.raises(ValueError):
            orthogonal_threshold(_spec("mbic2"), 100)


# ============================================================================
# Testes das penalidades auxiliares e cotas
# ============================================================================

class TestAuxiliaryPenalties:
    """bh_penalty, abdj_penalty e log_binomial"""

    def test_bh_penalty_first_term(self):
        from scipy.stats import norm
        assert bh_penalty(1, 100, 0.1) == pytest.approx(norm.isf(0.1 / 200) ** 2)
        assert bh_penalty(0, 100, 0.1) == 0.0

    def test_abdj(self):
        assert abdj_penalty(5, 500) == pytest.approx(10 * math.log(100))

    def test_log_binomial(self):
        assert log_binomial(10, 3) == pytest.approx(math.log(120))
        assert log_binomial(3, 5) == -math.inf


class TestNormalTailBounds:
    """Cotas de P(|Z| > c)"""

    @pytest.mark.parametrize("c", [1.5, 2.0, 3.0])
    def test_bounds_bracket_exact_tail(self, c):
        lower, upper = normal_tail_bounds(c)
        exact = erfc(c / math.sqrt(2))
        assert lower < exact < upper

    def test_bic_threshold_upper_bound(self):
        n = 10 ** 4
        _, upper = normal_tail_bounds(math.sqrt(math.log(n)))
        assert upper <= math.sqrt(2) / math.sqrt(math.pi) * (n * math.log(n)) ** -0.5 + 1e-15
        assert upper == pytest.approx(0.00263, abs=1e-5)

    def test_ratio_tends_to_one(self):
        lower, upper = normal_tail_bounds(30.0)
        assert upper > 0.0
        assert lower / upper == pytest.approx(1.0 - 30.0 ** -2, rel=1e-12)
        assert lower / upper > 0.998

    def test_requires_c_above_one(self):
        with pytest.raises(ValueError):
            normal_tail_bounds(1.0)
