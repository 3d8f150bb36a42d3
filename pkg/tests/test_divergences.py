"""Divergence family tests.

The independent oracle for every closed form is direct Monte-Carlo
integration of the defining expectation: (x, y) drawn from the true joint
law, per-sample log likelihood ratios transformed by the integrand of the
divergence in question.
"""

import math

import numpy as np
import pytest

from mdlasso.divergences import (AlphaOrder, alpha_div, bhattacharyya,
                                 hellinger_sq, kl_closed, renyi_mc)
from mdlasso.errors import InvalidOrderError
from mdlasso.model import DivergenceOrder, GaussianLinearModel, renyi_div


def random_model(rng, p_max=5):
    p = int(rng.integers(1, p_max + 1))
    A = rng.standard_normal((p, p))
    cov = A @ A.T + 0.5 * np.eye(p)
    return GaussianLinearModel(rng.standard_normal(p),
                               float(rng.uniform(0.5, 2.0)), cov)


def mc_integrand_mean(model, theta, transform, num, seed):
    """Mean and SE of transform(log p_theta/p_true) over true-law samples."""
    rng = np.random.default_rng(seed)
    X = model.draw_features(rng, num)
    y = X @ model.theta_star + math.sqrt(model.sigma2) * rng.standard_normal(num)
    r_true = y - X @ model.theta_star
    r_theta = y - X @ theta
    log_ratio = (r_true ** 2 - r_theta ** 2) / (2 * model.sigma2)
    vals = transform(log_ratio)
    return float(np.mean(vals)), float(np.std(vals, ddof=1) / math.sqrt(num))


class TestAlphaOrder:
    @pytest.mark.parametrize("alpha", [-1.0, 1.0, 2.0])
    def test_rejects_out_of_range(self, alpha):
        with pytest.raises(InvalidOrderError):
            AlphaOrder(alpha)


class TestRenyiMc:
    def test_exact_zero_at_truth(self):
        m = GaussianLinearModel(np.array([1.0, -1.0]), 1.0, np.eye(2))
        est = renyi_mc(m, m.theta_star, DivergenceOrder(0.5), 1000, seed=0)
        assert est.value == 0.0
        assert est.std_error == 0.0

    def test_log2_instance(self):
        m = GaussianLinearModel(np.zeros(3), 1.0, np.eye(3))
        theta = np.array([2.0, 0.0, 0.0])
        est = renyi_mc(m, theta, DivergenceOrder(0.5), 100_000, seed=1)
        assert abs(est.value - math.log(2.0)) <= 3 * est.std_error

    def test_high_order_random_instance(self):
        rng = np.random.default_rng(2)
        m = GaussianLinearModel(rng.standard_normal(3), 1.3,
                                np.eye(3) * 0.8 + 0.2 * np.ones((3, 3)))
        theta = m.theta_star + 0.5 * rng.standard_normal(3)
        order = DivergenceOrder(0.9)
        est = renyi_mc(m, theta, order, 100_000, seed=3)
        assert abs(est.value - renyi_div(m, theta, order)) <= 3 * est.std_error

    def test_reproducible(self):
        m = GaussianLinearModel(np.zeros(2), 1.0, np.eye(2))
        theta = np.array([0.4, -0.3])
        a = renyi_mc(m, theta, DivergenceOrder(0.25), 5000, seed=7)
        b = renyi_mc(m, theta, DivergenceOrder(0.25), 5000, seed=7)
        assert a == b

    def test_streaming_merge_matches_one_shot(self, monkeypatch):
        # force the chunked path, regenerate the identical sample layout,
        # and compare against a one-shot log-mean-exp with delta-method SE
        import mdlasso.divergences as dv
        from mdlasso.seeding import substream
        m = GaussianLinearModel(np.zeros(2), 1.0, np.eye(2))
        theta = np.array([1.0, 2.0])
        order = DivergenceOrder(0.5)
        num, chunk, seed = 4096, 1000, 11
        monkeypatch.setattr(dv, "_MC_CHUNK", chunk)
        got = renyi_mc(m, theta, order, num, seed=seed)

        rng = substream(seed)
        parts = []
        done = 0
        while done < num:
            k = min(chunk, num - done)
            X = m.draw_features(rng, k)
            y = X @ m.theta_star + rng.standard_normal(k)
            lr = ((y - X @ m.theta_star) ** 2 - (y - X @ theta) ** 2) / 2.0
            parts.append((1 - order.lam) * lr)
            done += k
        a = np.concatenate(parts)
        shift = a.max()
        r = np.exp(a - shift)
        want = -(shift + math.log(r.mean())) / (1 - order.lam)
        want_se = (r.std(ddof=1) / (r.mean() * math.sqrt(num))) / (1 - order.lam)
        assert got.value == pytest.approx(want, rel=1e-12)
        assert got.std_error == pytest.approx(want_se, rel=1e-9)

    def test_large_displacement_no_overflow(self):
        m = GaussianLinearModel(np.zeros(1), 1.0, np.eye(1))
        est = renyi_mc(m, np.array([1e4]), DivergenceOrder(0.5), 2000, seed=5)
        assert math.isfinite(est.value)

    def test_rejects_small_sample(self):
        m = GaussianLinearModel(np.zeros(1), 1.0, np.eye(1))
        with pytest.raises(ValueError):
            renyi_mc(m, np.array([1.0]), DivergenceOrder(0.5), 999, seed=0)


class TestKlClosed:
    def test_zero_at_truth(self):
        m = GaussianLinearModel(np.array([2.0]), 1.5, np.eye(1))
        assert kl_closed(m, m.theta_star) == 0.0

    def test_identity_instance(self):
        m = GaussianLinearModel(np.zeros(2), 1.0, np.eye(2))
        theta = np.array([2.0, 0.0])
        assert kl_closed(m, theta) == pytest.approx(2.0, rel=1e-14)
        # secondary oracle: Monte-Carlo of the log-ratio
        mean, se = mc_integrand_mean(m, theta, lambda lr: -lr, 100_000, seed=21)
        assert abs(mean - 2.0) <= 3 * se

    def test_anisotropic_instance(self):
        m = GaussianLinearModel(np.zeros(2), 2.0, np.diag([1.0, 4.0]))
        theta = np.array([1.0, 1.0])
        # quadratic-form arithmetic: (1 + 4) / (2 * 2)
        assert kl_closed(m, theta) == pytest.approx(1.25, rel=1e-14)
        mean, se = mc_integrand_mean(m, theta, lambda lr: -lr, 200_000, seed=22)
        assert abs(mean - 1.25) <= 3 * se


class TestBhattacharyya:
    def test_zero_at_truth(self):
        m = GaussianLinearModel(np.zeros(2), 1.0, np.eye(2))
        assert bhattacharyya(m, m.theta_star) == 0.0

    def test_log2_instance(self):
        m = GaussianLinearModel(np.zeros(2), 1.0, np.eye(2))
        assert bhattacharyya(m, np.array([2.0, 0.0])) == pytest.approx(
            math.log(2.0), rel=1e-14)

    def test_alias_of_half_order(self):
        rng = np.random.default_rng(23)
        for _ in range(10):
            m = random_model(rng)
            theta = m.theta_star + rng.standard_normal(m.dim)
            assert bhattacharyya(m, theta) == renyi_div(m, theta,
                                                        DivergenceOrder(0.5))


class TestHellingerSq:
    def test_zero_at_truth(self):
        m = GaussianLinearModel(np.zeros(2), 1.0, np.eye(2))
        assert hellinger_sq(m, m.theta_star) == 0.0

    def test_log2_instance(self):
        # frozen oracle 2 (1 - 2^{-1/2}) = 0.5857864376269049, plus
        # Monte-Carlo of the squared-root-difference integral in its
        # affinity form 2 (1 - E[sqrt(p_theta/p_true)]), whose integrand
        # has variance bounded by 1
        m = GaussianLinearModel(np.zeros(2), 1.0, np.eye(2))
        theta = np.array([2.0, 0.0])
        assert bhattacharyya(m, theta) == pytest.approx(math.log(2.0))
        got = hellinger_sq(m, theta)
        assert got == pytest.approx(0.5857864376269049, rel=1e-12)
        mean, se = mc_integrand_mean(
            m, theta, lambda lr: np.exp(0.5 * lr), 200_000, seed=24)
        assert abs(2.0 * (1.0 - mean) - got) <= 3 * 2.0 * se

    def test_asymptote(self):
        m = GaussianLinearModel(np.zeros(1), 1.0, np.eye(1))
        val = hellinger_sq(m, np.array([1e4]))  # displacement energy 1e8
        assert 1.999 < val <= 2.0

    def test_below_bhattacharyya(self):
        rng = np.random.default_rng(26)
        for _ in range(50):
            m = random_model(rng)
            theta = m.theta_star + rng.standard_normal(m.dim) * rng.uniform(0.01, 10)
            assert hellinger_sq(m, theta) <= bhattacharyya(m, theta) + 1e-12


class TestAlphaDiv:
    def test_zero_at_truth(self):
        m = GaussianLinearModel(np.zeros(2), 1.0, np.eye(2))
        assert alpha_div(m, m.theta_star, AlphaOrder(0.3)) == 0.0

    def test_alpha_zero_is_twice_hellinger(self):
        rng = np.random.default_rng(27)
        for _ in range(20):
            m = random_model(rng)
            theta = m.theta_star + rng.standard_normal(m.dim)
            d0 = alpha_div(m, theta, AlphaOrder(0.0))
            assert d0 == pytest.approx(2.0 * hellinger_sq(m, theta), rel=1e-12)

    def test_worked_instance_with_mc(self):
        # closed form 1.301712287901576 at alpha=0.5, energy 4, sigma2=1
        m = GaussianLinearModel(np.zeros(2), 1.0, np.eye(2))
        theta = np.array([2.0, 0.0])
        a = AlphaOrder(0.5)
        got = alpha_div(m, theta, a)
        assert got == pytest.approx(1.301712287901576, rel=1e-12)
        mean, se = mc_integrand_mean(
            m, theta, lambda lr: (4.0 / (1 - 0.25)) * (1.0 - np.exp(0.75 * lr)),
            100_000, seed=28)
        assert abs(mean - got) <= 3 * se

    def test_boundedness(self):
        rng = np.random.default_rng(29)
        for _ in range(200):
            m = random_model(rng)
            scale = 10 ** rng.uniform(-2, 4)
            theta = m.theta_star + rng.standard_normal(m.dim) * scale
            alpha = float(rng.uniform(-0.99, 0.99))
            val = alpha_div(m, theta, AlphaOrder(alpha))
            assert 0.0 <= val <= 4.0 / (1.0 - alpha ** 2) + 1e-12
        # extreme displacement saturates but never exceeds the cap
        m = GaussianLinearModel(np.zeros(1), 1.0, np.eye(1))
        val = alpha_div(m, np.array([1e4]), AlphaOrder(0.5))
        assert val <= 4.0 / (1.0 - 0.25)

    def test_order_relation(self):
        rng = np.random.default_rng(30)
        for _ in range(1000):
            m = random_model(rng)
            theta = m.theta_star + rng.standard_normal(m.dim) * rng.uniform(0.01, 10)
            alpha = float(rng.uniform(-0.99, 0.99))
            lam = DivergenceOrder((1.0 - alpha) / 2.0)
            slack = renyi_div(m, theta, lam) \
                - (1.0 - alpha) / 2.0 * alpha_div(m, theta, AlphaOrder(alpha))
            assert slack >= -1e-12


class TestMcClosedFormAgreement:
    def test_seeded_batch(self):
        # scaled-down version of the acceptance sweep: 20 instances,
        # at most one outside 3 SE
        rng = np.random.default_rng(31)
        bad = 0
        for i in range(20):
            m = random_model(rng)
            theta = m.theta_star + rng.standard_normal(m.dim) * 0.7
            order = DivergenceOrder([0.25, 0.5, 0.9][i % 3])
            est = renyi_mc(m, theta, order, 20_000, seed=600 + i)
            if abs(est.value - renyi_div(m, theta, order)) > 3 * est.std_error:
                bad += 1
        assert bad <= 1
