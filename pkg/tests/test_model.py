"""Model and divergence-calculus tests.

Finite differences are the oracle for the gradient and Hessian; the tilted
covariance is cross-checked against the rank-one inverse update; the
positive-semidefinite domination of the negative Hessian is certified by an
eigenvalue sweep with the exact boundary case pinned.
"""

import math

import numpy as np
import pytest

from mdlasso.errors import InvalidOrderError
from mdlasso.matops import sherman_morrison
from mdlasso.model import (DivergenceOrder, GaussianLinearModel,
                           displacement_energy, hessian_bound_gap, renyi_div,
                           renyi_div_n, renyi_grad, renyi_hess, tilt_scale,
                           tilted)


def random_model(rng, p_max=5):
    p = int(rng.integers(1, p_max + 1))
    A = rng.standard_normal((p, p))
    cov = A @ A.T + 0.5 * np.eye(p)
    return GaussianLinearModel(rng.standard_normal(p),
                               float(rng.uniform(0.5, 2.0)), cov)


def fd_gradient(model, theta, order):
    g = np.zeros(theta.size)
    for j in range(theta.size):
        h = 1e-5 * max(1.0, abs(theta[j]))
        up, dn = theta.copy(), theta.copy()
        up[j] += h
        dn[j] -= h
        g[j] = (renyi_div(model, up, order) - renyi_div(model, dn, order)) / (2 * h)
    return g


def fd_hessian(model, theta, order):
    H = np.zeros((theta.size, theta.size))
    for j in range(theta.size):
        h = 1e-5 * max(1.0, abs(theta[j]))
        up, dn = theta.copy(), theta.copy()
        up[j] += h
        dn[j] -= h
        H[:, j] = (renyi_grad(model, up, order) - renyi_grad(model, dn, order)) / (2 * h)
    return (H + H.T) / 2


class TestDivergenceOrder:
    @pytest.mark.parametrize("lam", [0.0, 1.0, -0.2, 1.5])
    def test_rejects_out_of_range(self, lam):
        with pytest.raises(InvalidOrderError):
            DivergenceOrder(lam)


class TestModelConstruction:
    def test_rejects_nonpositive_noise(self):
        with pytest.raises(ValueError):
            GaussianLinearModel(np.zeros(2), 0.0, np.eye(2))

    def test_rejects_dimension_mismatch(self):
        with pytest.raises(ValueError):
            GaussianLinearModel(np.zeros(3), 1.0, np.eye(2))

    def test_sqrt_cov_cached(self):
        rng = np.random.default_rng(0)
        m = random_model(rng)
        np.testing.assert_allclose(m.sqrt_cov @ m.sqrt_cov, m.cov,
                                   atol=1e-10 * np.linalg.norm(m.cov))

    def test_immutable(self):
        m = GaussianLinearModel(np.zeros(2), 1.0, np.eye(2))
        with pytest.raises(ValueError):
            m.cov[0, 0] = 2.0


class TestTilted:
    def test_zero_displacement(self):
        m = GaussianLinearModel(np.array([1.0, -2.0]), 1.0, np.eye(2))
        tq = tilted(m, m.theta_star, DivergenceOrder(0.3))
        np.testing.assert_allclose(tq.displacement, 0.0)
        assert tq.normalizer == pytest.approx(1.0)
        np.testing.assert_allclose(tq.covariance, m.cov)
        np.testing.assert_allclose(tq.interpolated_coeffs, m.theta_star)

    def test_scale_forced_at_half(self):
        m = GaussianLinearModel(np.zeros(1), 1.0, np.eye(1))
        assert tilt_scale(m, DivergenceOrder(0.5)) == pytest.approx(4.0)

    def test_worked_instance(self):
        # direct matrix arithmetic oracle: c = 4, ||disp||^2 = 4
        m = GaussianLinearModel(np.zeros(2), 1.0, np.eye(2))
        tq = tilted(m, np.array([2.0, 0.0]), DivergenceOrder(0.5))
        assert tq.normalizer == pytest.approx(math.sqrt(4.0 / 8.0), abs=1e-12)
        np.testing.assert_allclose(tq.covariance, np.diag([0.5, 1.0]), atol=1e-12)
        # the same matrix via the rank-one inverse update
        sm = sherman_morrison(m.cov, np.array([2.0, 0.0]) / 2.0,
                              np.array([2.0, 0.0]) / 2.0)
        np.testing.assert_allclose(tq.covariance, sm, atol=1e-12)

    def test_covariance_matches_rank_one_update(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            m = random_model(rng)
            theta = m.theta_star + rng.standard_normal(m.dim)
            order = DivergenceOrder(float(rng.uniform(0.05, 0.95)))
            tq = tilted(m, theta, order)
            tb = theta - m.theta_star
            sm = sherman_morrison(m.cov, tb / math.sqrt(tq.scale),
                                  tb / math.sqrt(tq.scale))
            assert np.linalg.norm(tq.covariance - sm) <= 1e-9 * np.linalg.norm(sm)

    def test_interpolated_coeffs(self):
        m = GaussianLinearModel(np.array([1.0, 0.0]), 1.0, np.eye(2))
        tq = tilted(m, np.array([3.0, 2.0]), DivergenceOrder(0.25))
        np.testing.assert_allclose(tq.interpolated_coeffs,
                                   0.25 * m.theta_star + 0.75 * np.array([3.0, 2.0]))


class TestRenyiDiv:
    def test_zero_at_truth(self):
        rng = np.random.default_rng(8)
        m = random_model(rng)
        assert renyi_div(m, m.theta_star, DivergenceOrder(0.5)) == 0.0

    def test_worked_values(self):
        m = GaussianLinearModel(np.zeros(4), 1.0, np.eye(4))
        theta = np.array([2.0, 0.0, 0.0, 0.0])
        assert renyi_div(m, theta, DivergenceOrder(0.5)) == pytest.approx(
            math.log(2.0), rel=1e-12)
        m4 = GaussianLinearModel(np.zeros(4), 4.0, np.eye(4))
        assert renyi_div(m4, theta, DivergenceOrder(0.5)) == pytest.approx(
            math.log(1.25), rel=1e-12)

    def test_n_sample_factorization(self):
        rng = np.random.default_rng(9)
        m = random_model(rng)
        theta = m.theta_star + rng.standard_normal(m.dim)
        order = DivergenceOrder(0.7)
        assert renyi_div_n(m, theta, order, 37) == pytest.approx(
            37 * renyi_div(m, theta, order), rel=1e-14)

    def test_monotone_in_order(self):
        rng = np.random.default_rng(10)
        for _ in range(20):
            m = random_model(rng)
            theta = m.theta_star + rng.standard_normal(m.dim)
            vals = [renyi_div(m, theta, DivergenceOrder(l))
                    for l in np.arange(0.05, 0.96, 0.05)]
            assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))

    def test_nonnegative_zero_only_at_truth(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            m = random_model(rng)
            theta = m.theta_star + rng.standard_normal(m.dim) * 0.1
            d = renyi_div(m, theta, DivergenceOrder(0.5))
            if np.array_equal(theta, m.theta_star):
                assert d == 0.0
            else:
                assert d > 0.0

    def test_kl_limit(self):
        # as lam -> 1 the divergence approaches energy / (2 sigma2)
        rng = np.random.default_rng(12)
        for _ in range(20):
            m = random_model(rng)
            direction = rng.standard_normal(m.dim)
            direction /= math.sqrt(direction @ (m.cov @ direction))
            theta = m.theta_star + direction * math.sqrt(
                0.1 * m.sigma2 * rng.uniform(0.1, 1.0))
            kl = displacement_energy(m, theta) / (2 * m.sigma2)
            for lam, rtol in ((0.9, 0.12), (0.99, 0.012), (0.999, 2e-3)):
                d = renyi_div(m, theta, DivergenceOrder(lam))
                assert abs(d - kl) <= rtol * kl


class TestRenyiGrad:
    def test_zero_at_truth(self):
        m = GaussianLinearModel(np.array([1.0, 2.0]), 1.0, np.eye(2))
        np.testing.assert_allclose(
            renyi_grad(m, m.theta_star, DivergenceOrder(0.5)), 0.0)

    def test_scalar_instance(self):
        # hand value 0.5, cross-checked by central differences
        m = GaussianLinearModel(np.zeros(1), 1.0, np.eye(1))
        theta = np.array([2.0])
        order = DivergenceOrder(0.5)
        g = renyi_grad(m, theta, order)
        assert g[0] == pytest.approx(0.5, abs=1e-12)
        fd = fd_gradient(m, theta, order)
        assert abs(g[0] - fd[0]) <= 1e-6 * abs(fd[0])

    def test_fd_sweep(self):
        rng = np.random.default_rng(13)
        for _ in range(100):
            m = random_model(rng)
            theta = m.theta_star + rng.standard_normal(m.dim)
            order = DivergenceOrder(float(rng.uniform(0.05, 0.95)))
            g = renyi_grad(m, theta, order)
            fd = fd_gradient(m, theta, order)
            assert np.linalg.norm(g - fd) <= 1e-5 * max(np.linalg.norm(fd), 1e-12)


class TestRenyiHess:
    def test_at_truth(self):
        rng = np.random.default_rng(14)
        m = random_model(rng)
        order = DivergenceOrder(0.4)
        np.testing.assert_allclose(
            renyi_hess(m, m.theta_star, order),
            (order.lam / m.sigma2) * m.cov, atol=1e-13)

    def test_scalar_zero_point(self):
        # at displacement energy 4 with c = 4 the scalar Hessian vanishes
        m = GaussianLinearModel(np.zeros(1), 1.0, np.eye(1))
        H = renyi_hess(m, np.array([2.0]), DivergenceOrder(0.5))
        assert H[0, 0] == pytest.approx(0.0, abs=1e-14)
        fd = fd_hessian(m, np.array([2.0]), DivergenceOrder(0.5))
        assert abs(H[0, 0] - fd[0, 0]) <= 1e-8

    def test_fd_sweep(self):
        rng = np.random.default_rng(15)
        for _ in range(100):
            m = random_model(rng, p_max=3)
            theta = m.theta_star + rng.standard_normal(m.dim)
            order = DivergenceOrder(float(rng.uniform(0.05, 0.95)))
            H = renyi_hess(m, theta, order)
            fd = fd_hessian(m, theta, order)
            assert np.linalg.norm(H - fd) <= 1e-4 * max(np.linalg.norm(fd), 1e-12)


class TestHessianBoundGap:
    def test_at_truth(self):
        m = GaussianLinearModel(np.zeros(3), 2.0, np.eye(3))
        order = DivergenceOrder(0.5)
        gap = hessian_bound_gap(m, m.theta_star, order)
        assert gap == pytest.approx(9 * order.lam / (8 * m.sigma2), rel=1e-12)

    def test_exact_zero_at_three_scales(self):
        # the domination is tight exactly at displacement energy 3c
        m = GaussianLinearModel(np.zeros(1), 1.0, np.eye(1))
        order = DivergenceOrder(0.5)
        c = tilt_scale(m, order)
        theta = np.array([math.sqrt(3.0 * c)])
        assert displacement_energy(m, theta) == pytest.approx(12.0)
        assert abs(hessian_bound_gap(m, theta, order)) <= 1e-10

    def test_sweep_nonnegative(self):
        rng = np.random.default_rng(16)
        for _ in range(1000):
            m = random_model(rng, p_max=6)
            theta = m.theta_star + rng.standard_normal(m.dim) * rng.uniform(0.1, 30)
            order = DivergenceOrder(float(rng.uniform(0.02, 0.98)))
            assert hessian_bound_gap(m, theta, order) >= -1e-8
