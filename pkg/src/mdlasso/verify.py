"""Self-contained invariant suite behind ``mdlasso verify``.

Each check exercises one documented invariant of a module at a scale chosen
to finish in seconds (``--quick`` trims the Monte-Carlo sizes further). A
check passes by returning normally; any exception marks it failed. One line
is printed per check.
"""

import math

import numpy as np

from . import bounds, divergences, lasso, matops, penalty, sim, typical_set
from .model import (DivergenceOrder, GaussianLinearModel, hessian_bound_gap,
                    renyi_div, renyi_grad, renyi_hess, tilted)
from .seeding import substream


def _random_spd(rng, p, jitter=0.5):
    A = rng.standard_normal((p, p))
    return A @ A.T + jitter * np.eye(p)


def _random_model(rng, p_max=5):
    p = int(rng.integers(1, p_max + 1))
    cov = _random_spd(rng, p)
    theta_star = rng.standard_normal(p)
    sigma2 = float(rng.uniform(0.5, 2.0))
    return GaussianLinearModel(theta_star, sigma2, cov)


def check_matops_sqrt_roundtrip(quick):
    rng = substream(101)
    for _ in range(20 if quick else 100):
        S = _random_spd(rng, int(rng.integers(1, 8)))
        R = matops.sqrt_sym(S)
        err = np.linalg.norm(R @ R - S) / np.linalg.norm(S)
        assert err <= 1e-10, f"reconstruction error {err:.3e}"
        assert matops.min_eigenvalue(R) > 0.0


def check_matops_sherman_morrison(quick):
    rng = substream(102)
    for _ in range(100):
        p = int(rng.integers(2, 9))
        A = _random_spd(rng, p, jitter=1.0)
        c = rng.standard_normal(p)
        d = rng.standard_normal(p)
        if abs(1.0 + d @ np.linalg.solve(A, c)) < 1e-6:
            continue
        got = matops.sherman_morrison(np.linalg.inv(A), c, d)
        want = np.linalg.inv(A + np.outer(c, d))
        err = np.linalg.norm(got - want) / np.linalg.norm(want)
        assert err <= 1e-9, f"update error {err:.3e}"


def check_matops_rayleigh(quick):
    rng = substream(103)
    S = _random_spd(rng, 6) - 3.0 * np.eye(6)
    lo = matops.min_eigenvalue(S)
    for _ in range(20):
        v = rng.standard_normal(6)
        assert lo <= (v @ S @ v) / (v @ v) + 1e-9


def check_model_monotone_in_order(quick):
    rng = substream(104)
    for _ in range(10 if quick else 50):
        m = _random_model(rng)
        theta = m.theta_star + rng.standard_normal(m.dim)
        grid = np.arange(0.05, 0.96, 0.05)
        vals = [renyi_div(m, theta, DivergenceOrder(l)) for l in grid]
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
        assert vals[0] >= 0.0


def check_model_gradient_fd(quick):
    rng = substream(105)
    for _ in range(20 if quick else 100):
        m = _random_model(rng)
        theta = m.theta_star + rng.standard_normal(m.dim)
        order = DivergenceOrder(float(rng.uniform(0.05, 0.95)))
        g = renyi_grad(m, theta, order)
        fd = np.zeros(m.dim)
        for j in range(m.dim):
            h = 1e-5 * max(1.0, abs(theta[j]))
            up, dn = theta.copy(), theta.copy()
            up[j] += h
            dn[j] -= h
            fd[j] = (renyi_div(m, up, order) - renyi_div(m, dn, order)) / (2 * h)
        err = np.linalg.norm(g - fd) / max(np.linalg.norm(fd), 1e-12)
        assert err <= 1e-5, f"gradient mismatch {err:.3e}"


def check_model_hessian_fd(quick):
    rng = substream(106)
    for _ in range(20 if quick else 100):
        m = _random_model(rng)
        theta = m.theta_star + rng.standard_normal(m.dim)
        order = DivergenceOrder(float(rng.uniform(0.05, 0.95)))
        H = renyi_hess(m, theta, order)
        fd = np.zeros((m.dim, m.dim))
        for j in range(m.dim):
            h = 1e-5 * max(1.0, abs(theta[j]))
            up, dn = theta.copy(), theta.copy()
            up[j] += h
            dn[j] -= h
            fd[:, j] = (renyi_grad(m, up, order) - renyi_grad(m, dn, order)) / (2 * h)
        fd = (fd + fd.T) / 2
        err = np.linalg.norm(H - fd) / max(np.linalg.norm(fd), 1e-12)
        assert err <= 1e-4, f"hessian mismatch {err:.3e}"


def check_model_hessian_domination(quick):
    rng = substream(107)
    for _ in range(200 if quick else 1000):
        m = _random_model(rng, p_max=6)
        theta = m.theta_star + rng.standard_normal(m.dim) * rng.uniform(0.1, 30)
        order = DivergenceOrder(float(rng.uniform(0.02, 0.98)))
        gap = hessian_bound_gap(m, theta, order)
        assert gap >= -1e-8, f"gap {gap:.3e}"


def check_model_tilted_consistency(quick):
    rng = substream(108)
    for _ in range(50):
        m = _random_model(rng)
        theta = m.theta_star + rng.standard_normal(m.dim)
        order = DivergenceOrder(float(rng.uniform(0.05, 0.95)))
        tq = tilted(m, theta, order)
        tb = theta - m.theta_star
        sm = matops.sherman_morrison(m.cov, tb / math.sqrt(tq.scale),
                                     tb / math.sqrt(tq.scale))
        err = np.linalg.norm(tq.covariance - sm) / np.linalg.norm(sm)
        assert err <= 1e-9, f"tilted covariance mismatch {err:.3e}"


def check_model_kl_limit(quick):
    rng = substream(109)
    for _ in range(20):
        m = _random_model(rng)
        direction = rng.standard_normal(m.dim)
        direction /= math.sqrt(direction @ (m.cov @ direction))
        # displacement energy <= 0.1 sigma2 keeps all orders in the
        # near-quadratic regime of the log
        theta = m.theta_star + direction * math.sqrt(0.1 * m.sigma2 * rng.uniform(0.1, 1.0))
        kl = divergences.kl_closed(m, theta)
        for lam, rtol in ((0.9, 0.12), (0.99, 0.012), (0.999, 2e-3)):
            d = renyi_div(m, theta, DivergenceOrder(lam))
            assert abs(d - kl) <= rtol * kl, f"lam={lam}: {d} vs {kl}"


def check_divergences_mc_agreement(quick):
    rng = substream(110)
    runs = 5 if quick else 20
    samples = 20_000 if quick else 100_000
    bad = 0
    for i in range(runs):
        m = _random_model(rng)
        theta = m.theta_star + rng.standard_normal(m.dim) * 0.7
        lam = [0.25, 0.5, 0.9][i % 3]
        order = DivergenceOrder(lam)
        est = divergences.renyi_mc(m, theta, order, samples, seed=7000 + i)
        if abs(est.value - renyi_div(m, theta, order)) > 3 * est.std_error:
            bad += 1
    assert bad <= max(1, runs // 20), f"{bad}/{runs} MC runs outside 3 SE"


def check_divergences_alpha_properties(quick):
    rng = substream(111)
    for _ in range(200 if quick else 1000):
        m = _random_model(rng)
        scale = 10 ** rng.uniform(-2, 4)
        theta = m.theta_star + rng.standard_normal(m.dim) * scale
        alpha = float(rng.uniform(-0.99, 0.99))
        a = divergences.AlphaOrder(alpha)
        val = divergences.alpha_div(m, theta, a)
        assert 0.0 <= val <= 4.0 / (1.0 - alpha ** 2) + 1e-12
        lam = DivergenceOrder((1.0 - alpha) / 2.0)
        slack = renyi_div(m, theta, lam) - (1.0 - alpha) / 2.0 * val
        assert slack >= -1e-12, f"order relation violated by {slack:.3e}"
    # alpha = 0 identities
    m = _random_model(rng)
    theta = m.theta_star + rng.standard_normal(m.dim)
    h2 = divergences.hellinger_sq(m, theta)
    d0 = divergences.alpha_div(m, theta, divergences.AlphaOrder(0.0))
    assert abs(d0 - 2.0 * h2) <= 1e-12 * max(1.0, d0)
    assert h2 <= divergences.bhattacharyya(m, theta) + 1e-12


def check_penalty_kraft(quick):
    for p in np.unique(np.logspace(0, 4, 40).astype(int)):
        assert penalty.kraft_sum(int(p), 0.5) <= 1.0
    assert abs(penalty.kraft_sum(1, 0.5) - 5.0 / 6.0) < 1e-15


def check_penalty_rounding_moments(quick):
    draws = 20_000 if quick else 100_000
    w = np.array([1.0, 2.0, 0.5])
    spec = penalty.QuantizerSpec(delta=0.8, w_star=w, beta=0.5)
    theta = np.array([0.3, -1.7, 2.2])
    acc = np.zeros(3)
    acc_abs = np.zeros(3)
    acc_sq = np.zeros(3)
    for i in range(draws):
        t = penalty.randomize_quantize(theta, spec, seed=13_000 + i)
        acc += t
        acc_abs += np.abs(t)
        acc_sq += (t - theta) ** 2
    se = spec.delta / w / math.sqrt(draws)  # step bounds the per-draw spread
    assert np.all(np.abs(acc / draws - theta) <= 4 * se)
    assert np.all(np.abs(acc_abs / draws - np.abs(theta)) <= 4 * se)
    var_limit = (spec.delta / w) * np.abs(theta)
    se_sq = (spec.delta / w) ** 2 / math.sqrt(draws)
    assert np.all(acc_sq / draws <= var_limit + 4 * se_sq)


def check_penalty_ratio_consistency(quick):
    for lam in (0.1, 0.3, 0.5, 0.7, 0.9):
        order = DivergenceOrder(lam)
        got = penalty.min_coefficients(
            200, 1000, order, beta=1.0 - lam, eps=1e-12, sigma2=1.3).mu1
        ratio = got / penalty.fixed_design_mu1(200, 1000, 1.3)
        assert abs(ratio - penalty.design_ratio(order)) <= 1e-9
    grid = [penalty.design_ratio(DivergenceOrder(l))
            for l in np.linspace(0.01, 0.99, 100)]
    assert all(b > a for a, b in zip(grid, grid[1:]))
    assert grid[0] >= 1.0


def check_typical_set_simplification(quick):
    for eps in np.arange(1e-3, 1.0 + 1e-9, 1e-3):
        assert 0.5 * (eps - math.log1p(eps)) >= eps ** 2 / 7.0


def check_typical_set_chain(quick):
    for n in (10, 100, 1000):
        for p in (1, 10, 1000):
            for eps in np.arange(0.1, 0.95, 0.1):
                t = typical_set.prob_lower_bounds(n, p, float(eps))
                assert t.exact_product >= t.linearized - 1e-12
                assert t.linearized >= t.simplified - 1e-12


def check_typical_set_membership_freq(quick):
    n, p, eps = 50, 5, 0.3
    draws = 2000 if quick else 10_000
    rng = substream(112)
    hits = sum(typical_set.is_typical(rng.standard_normal((n, p)), np.eye(p), eps)
               for _ in range(draws))
    freq = hits / draws
    bound = typical_set.prob_lower_bounds(n, p, eps).exact_product
    se = math.sqrt(max(freq * (1 - freq), 1e-12) / draws)
    assert freq >= bound - 3 * se, f"{freq} < {bound}"


def check_typical_set_gamma_tail(quick):
    draws = 20_000 if quick else 100_000
    for s in (0.5, 1.0, 4.0):
        emp, bnd = typical_set.gamma_tail_check(50, 0.3, draws, seed=113, s=s)
        se = math.sqrt(max(emp * (1 - emp), 1e-12) / draws)
        assert emp <= bnd + 3 * se, f"s={s}: {emp} > {bnd}"


def check_typical_set_column_decomposition(quick):
    rng = substream(114)
    for _ in range(50):
        X = rng.standard_normal((30, 4)) * rng.uniform(0.8, 1.2)
        cov = np.diag(rng.uniform(0.5, 2.0, size=4))
        eps = float(rng.uniform(0.05, 0.5))
        whole = typical_set.is_typical(X, cov, eps)
        per_col = all(
            typical_set.column_is_typical(X[:, j], float(cov[j, j]), eps)
            for j in range(4))
        assert whole == per_col


def _small_problem(rng, n=40, p=12, snr=2.0):
    theta_star = sim.default_theta_star(p, sparsity=4)
    sigma2 = sim.snr_to_sigma2(theta_star, np.eye(p), snr)
    model = GaussianLinearModel(theta_star, sigma2, np.eye(p))
    X = model.draw_features(rng, n)
    Y = model.draw_response(rng, X)
    coeffs = penalty.min_coefficients(n, p, DivergenceOrder(0.5), 0.5, 0.5, sigma2)
    return model, lasso.LassoProblem(X, Y, sigma2, coeffs)


def check_lasso_descent_and_kkt(quick):
    rng = substream(115)
    for _ in range(5 if quick else 20):
        _, prob = _small_problem(rng)
        report = lasso.solve(prob)
        assert report.converged
        diffs = np.diff(report.objective_trace)
        assert np.all(diffs <= 1e-12), f"ascent step {diffs.max():.3e}"
        assert lasso.kkt_residual(prob, report.theta_hat) <= 1e-6


def check_lasso_orthonormal_closed_form(quick):
    rng = substream(116)
    n, p = 60, 12
    Q, _ = np.linalg.qr(rng.standard_normal((n, p)))
    X = Q * math.sqrt(n)
    theta_star = sim.default_theta_star(p, sparsity=4)
    Y = X @ theta_star + rng.standard_normal(n)
    coeffs = penalty.PenaltyCoefficients(0.4, 0.01)
    prob = lasso.LassoProblem(X, Y, 1.0, coeffs)
    report = lasso.solve(prob, tol=1e-10)
    closed = lasso.soft_threshold(X.T @ Y / n, coeffs.mu1 * 1.0)
    assert np.max(np.abs(report.theta_hat - closed)) <= 1e-6


def check_lasso_paper_scale(quick):
    if quick:
        return
    rng = substream(117)
    theta_star = sim.default_theta_star(1000)
    sigma2 = sim.snr_to_sigma2(theta_star, np.eye(1000), 1.5)
    model = GaussianLinearModel(theta_star, sigma2, np.eye(1000))
    X = model.draw_features(rng, 200)
    Y = model.draw_response(rng, X)
    coeffs = penalty.min_coefficients(200, 1000, DivergenceOrder(0.5), 0.5, 0.5, sigma2)
    prob = lasso.LassoProblem(X, Y, sigma2, coeffs)
    report = lasso.solve(prob)
    assert report.converged and report.iterations <= 5000
    assert report.kkt_residual <= 1e-6


def check_bounds_floor_identity(quick):
    rng = substream(118)
    model, prob = _small_problem(rng, n=60, p=8, snr=1.0)
    cfg = bounds.BoundConfig(DivergenceOrder(0.5), 0.5, 0.5, 0.03)
    cert = bounds.regret_certificate(prob, model, cfg)
    triple = typical_set.prob_lower_bounds(prob.n, prob.p, cfg.eps)
    want = triple.exact_product - math.exp(-cfg.tau * prob.n * cfg.beta)
    assert abs(cert.probability_floor - max(0.0, want)) <= 1e-12
    assert cert.bound >= cert.main_term


def check_bounds_main_term_is_minimum(quick):
    rng = substream(119)
    model, prob = _small_problem(rng)
    report = lasso.solve(prob, tol=1e-9)
    main = bounds.regret_main_term(prob, model.theta_star, report.theta_hat)
    for _ in range(100):
        probe = report.theta_hat + rng.standard_normal(prob.p) * 0.3
        probe_val = bounds.regret_main_term(prob, model.theta_star, probe)
        assert probe_val >= main - 1e-9


def check_bounds_alpha_monotone_in_probability(quick):
    a = divergences.AlphaOrder(0.2)
    grid = np.linspace(math.exp(-1.0) + 1e-3, 1.0, 50)
    vals = [bounds.alpha_bound_at_probability(0.7, 0.55, a, float(pt))
            for pt in grid]
    assert all(b <= a_ + 1e-12 for a_, b in zip(vals, vals[1:]))


def check_sim_determinism(quick):
    cfg = sim.ExperimentConfig(n=30, p=10, seed=2024, snr=1.0, num_trials=3,
                               eps=0.9, tau=0.2, sparsity=3)
    first = [sim.run_trial(cfg, i) for i in range(3)]
    again = [sim.run_trial(cfg, i) for i in reversed(range(3))][::-1]
    assert first == again


def check_sim_hellinger_chain(quick):
    cfg = sim.ExperimentConfig(n=40, p=15, seed=77, snr=1.5,
                               num_trials=10 if quick else 50,
                               eps=0.9, tau=0.2, sparsity=5)
    records, _ = sim.run_experiment(cfg)
    for r in records:
        assert r.two_hellinger_sq <= r.d_bhatta + 1e-12


def check_sim_dominance_floor(quick):
    cfg = sim.ExperimentConfig(n=50, p=20, seed=31, snr=1.0,
                               num_trials=200 if quick else 1000,
                               eps=0.9, tau=0.2)
    records, summary = sim.run_experiment(cfg)
    cert_floor = typical_set.prob_lower_bounds(50, 20, 0.9).exact_product \
        - math.exp(-0.2 * 50 * 0.5)
    k = summary.num_converged
    f = summary.dominance_fraction
    se = math.sqrt(max(f * (1 - f), 1e-12) / k)
    assert f >= cert_floor - 3 * se, f"{f} < {cert_floor}"
    typ = summary.typical_fraction
    bound = typical_set.prob_lower_bounds(50, 20, 0.9).exact_product
    se_t = math.sqrt(max(typ * (1 - typ), 1e-12) / len(records))
    assert typ >= bound - 3 * se_t


CHECKS = [
    ("matops.sqrt_roundtrip", check_matops_sqrt_roundtrip),
    ("matops.sherman_morrison", check_matops_sherman_morrison),
    ("matops.rayleigh_bound", check_matops_rayleigh),
    ("model.order_monotonicity", check_model_monotone_in_order),
    ("model.gradient_fd", check_model_gradient_fd),
    ("model.hessian_fd", check_model_hessian_fd),
    ("model.hessian_domination", check_model_hessian_domination),
    ("model.tilted_consistency", check_model_tilted_consistency),
    ("model.kl_limit", check_model_kl_limit),
    ("divergences.mc_agreement", check_divergences_mc_agreement),
    ("divergences.alpha_properties", check_divergences_alpha_properties),
    ("penalty.kraft", check_penalty_kraft),
    ("penalty.rounding_moments", check_penalty_rounding_moments),
    ("penalty.ratio_consistency", check_penalty_ratio_consistency),
    ("typical_set.simplification", check_typical_set_simplification),
    ("typical_set.bound_chain", check_typical_set_chain),
    ("typical_set.membership_freq", check_typical_set_membership_freq),
    ("typical_set.gamma_tail", check_typical_set_gamma_tail),
    ("typical_set.column_decomposition", check_typical_set_column_decomposition),
    ("lasso.descent_and_kkt", check_lasso_descent_and_kkt),
    ("lasso.orthonormal_closed_form", check_lasso_orthonormal_closed_form),
    ("lasso.paper_scale", check_lasso_paper_scale),
    ("bounds.floor_identity", check_bounds_floor_identity),
    ("bounds.main_term_minimum", check_bounds_main_term_is_minimum),
    ("bounds.alpha_monotone", check_bounds_alpha_monotone_in_probability),
    ("sim.determinism", check_sim_determinism),
    ("sim.hellinger_chain", check_sim_hellinger_chain),
    ("sim.dominance_floor", check_sim_dominance_floor),
]


def run_verification(quick: bool = False) -> int:
    """Run every check, print one line each, return the number of failures."""
    failures = 0
    for name, fn in CHECKS:
        try:
            fn(quick)
        except Exception as exc:  # noqa: BLE001 - any failure marks the check
            failures += 1
            print(f"FAIL {name}: {exc}")
        else:
            print(f"PASS {name}")
    total = len(CHECKS)
    print(f"{total - failures}/{total} checks passed")
    return failures
