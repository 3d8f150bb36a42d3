"""Typical-set membership, probability bound chain, and Gamma tail tests."""

import math

import numpy as np
import pytest

from mdlasso.typical_set import (column_is_typical, gamma_tail_check,
                                 is_typical, prob_lower_bounds, sanov_exponent)


class TestIsTypical:
    def test_exact_columns(self):
        # every column mean square exactly matches the diagonal
        X = np.array([[1.0, 2.0], [-1.0, -2.0], [1.0, 2.0], [-1.0, 2.0]])
        cov = np.diag([1.0, 4.0])
        for eps in (1e-6, 0.1, 0.9):
            assert is_typical(X, cov, eps)

    def test_inflated_column(self):
        eps = 0.2
        X = np.ones((5, 1)) * math.sqrt(1.0 + 2 * eps)
        assert not is_typical(X, np.eye(1), eps)

    def test_closed_boundary(self):
        # dyadic entries make the column mean squares exact in floats:
        # upper ratio (2.25 + 0.25)/2 = 1.25 = 1 + eps at eps = 0.25,
        # lower ratio (0.25 + 0.25 + 1 + 1)/4 = 0.625 = 1 - eps at eps = 0.375
        X_hi = np.array([[1.5], [0.5]])
        assert is_typical(X_hi, np.eye(1), 0.25)
        assert not is_typical(X_hi, np.eye(1), 0.2499999)
        X_lo = np.array([[0.5], [0.5], [1.0], [1.0]])
        assert is_typical(X_lo, np.eye(1), 0.375)
        assert not is_typical(X_lo, np.eye(1), 0.3749999)

    def test_column_decomposition(self):
        rng = np.random.default_rng(40)
        for _ in range(50):
            X = rng.standard_normal((30, 4)) * rng.uniform(0.8, 1.2)
            cov = np.diag(rng.uniform(0.5, 2.0, size=4))
            eps = float(rng.uniform(0.05, 0.5))
            per_col = all(column_is_typical(X[:, j], float(cov[j, j]), eps)
                          for j in range(4))
            assert is_typical(X, cov, eps) == per_col

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            is_typical(np.ones((3, 2)), np.eye(3), 0.5)

    def test_rejects_nonpositive_diagonal(self):
        with pytest.raises(ValueError):
            is_typical(np.ones((3, 1)), np.zeros((1, 1)), 0.5)


class TestSanovExponent:
    def test_worked_upper(self):
        # 100 (0.5 - log 1.5) = 9.45348918918356
        assert sanov_exponent(200, 0.5, "upper") == pytest.approx(
            9.45348918918356, rel=1e-12)

    def test_lower_dominates_upper(self):
        for eps in np.arange(0.01, 1.0, 0.01):
            up = sanov_exponent(100, float(eps), "upper")
            lo = sanov_exponent(100, float(eps), "lower")
            assert lo >= up

    def test_small_eps_quadratic(self):
        n = 1000
        for eps in (1e-3, 1e-4):
            quad = n * eps ** 2 / 4.0
            assert sanov_exponent(n, eps, "upper") == pytest.approx(quad, rel=2e-3 if eps == 1e-3 else 2e-4)
            assert sanov_exponent(n, eps, "lower") == pytest.approx(quad, rel=2e-3 if eps == 1e-3 else 2e-4)

    def test_rejects_bad_side(self):
        with pytest.raises(ValueError, match="side"):
            sanov_exponent(10, 0.5, "sideways")


class TestProbLowerBounds:
    def test_reference_configuration(self):
        # frozen high-precision evaluation at n=200, p=1000, eps=0.5:
        # 2 e^{-9.45348918918356} = 1.5683096187181573e-4,
        # (1 - that)^1000 = 0.8548380346627614
        t = prob_lower_bounds(200, 1000, 0.5)
        assert t.exact_product == pytest.approx(0.8548380346627614, rel=1e-12)
        assert not t.vacuous

    def test_vacuous_at_tiny_eps(self):
        t = prob_lower_bounds(200, 1000, 1e-6)
        assert t.exact_product == 0.0
        assert t.vacuous
        assert t.linearized < 0.0

    def test_chain_ordering_grid(self):
        for n in (10, 100, 1000):
            for p in (1, 10, 1000):
                for eps in np.arange(0.1, 0.95, 0.1):
                    t = prob_lower_bounds(n, p, float(eps))
                    assert 0.0 <= t.exact_product <= 1.0
                    assert t.exact_product >= t.linearized - 1e-12
                    assert t.linearized >= t.simplified - 1e-12

    def test_simplification_constant(self):
        # (1/2)(eps - log(1+eps)) >= eps^2/7 across (0, 1]; margin at 1 is
        # 0.15342640972002736 vs 1/7 = 0.14285714285714285
        grid = np.arange(1e-3, 1.0 + 1e-12, 1e-3)
        lhs = 0.5 * (grid - np.log1p(grid))
        assert np.all(lhs >= grid ** 2 / 7.0)
        assert 0.5 * (1 - math.log(2.0)) == pytest.approx(0.15342640972002736)

    def test_membership_frequency_oracle(self):
        n, p, eps = 50, 5, 0.3
        rng = np.random.default_rng(41)
        draws = 10_000
        hits = sum(is_typical(rng.standard_normal((n, p)), np.eye(p), eps)
                   for _ in range(draws))
        freq = hits / draws
        bound = prob_lower_bounds(n, p, eps).exact_product
        se = math.sqrt(freq * (1 - freq) / draws)
        assert freq >= bound - 3 * se


class TestGammaTail:
    def test_reference_bound(self):
        emp, bnd = gamma_tail_check(200, 0.5, 100_000, seed=42)
        assert bnd == pytest.approx(7.841548093590787e-05, rel=1e-12)
        se = math.sqrt(max(emp * (1 - emp), 1e-12) / 100_000)
        assert emp <= bnd + 3 * se

    def test_eps_zero_trivial(self):
        emp, bnd = gamma_tail_check(50, 0.0, 1000, seed=43)
        assert bnd == 1.0
        assert emp <= 1.0

    def test_scale_invariance(self):
        draws = 50_000
        results = [gamma_tail_check(50, 0.3, draws, seed=44, s=s)
                   for s in (0.5, 1.0, 4.0)]
        bounds_ = {r.analytic_bound for r in results}
        assert len(bounds_) == 1  # identical exponent across scales
        for emp, bnd in results:
            se = math.sqrt(max(emp * (1 - emp), 1e-12) / draws)
            assert emp <= bnd + 3 * se

    def test_rejects_small_mc(self):
        with pytest.raises(ValueError):
            gamma_tail_check(50, 0.3, 999, seed=0)
