"""Evaluators for the risk bound, regret bound, and probability floor.

For a lasso problem whose penalty coefficients meet ``min_coefficients``,
the regret bound states that with probability at least

    floor = exact_product(n, p, eps) - exp(-tau n beta)

the single-sample Renyi divergence at the lasso solution is at most

    main_term + tau,
    main_term = inf_theta { (||Y - X theta||^2 - ||Y - X theta_star||^2)
                            / (2 n sigma2) + mu1 ||theta||_{w,1} + mu2 }.

The infimum is attained at the lasso solution itself, because the bracket
differs from the solver objective only by a theta-independent constant.

The risk-bound right-hand side replaces the realized main term by its
conditional expectation over typical designs (estimated here by rejection
sampling, which realizes the conditional law exactly) plus the closed-form
penalty -p log(1 - 2 e^{-D}) / (n beta).

The true typical-set probability P is not computable; wherever a bound needs
it (the alpha-divergence bound below), the exact_product lower bound is
substituted. The substitution is conservative only while P >= 1/e, where
P log(1/P) and (1 - P) are both decreasing, so that regime is asserted.
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .divergences import AlphaOrder
from .errors import (InsufficientAcceptanceError, InvalidCertificateError,
                     InvalidOrderError)
from .lasso import LassoProblem, objective, solve
from .model import DivergenceOrder, GaussianLinearModel, renyi_div
from .penalty import PenaltyCoefficients, min_coefficients
from .seeding import substream
from .typical_set import is_typical, prob_lower_bounds, sanov_exponent

_COEFF_RTOL = 1e-9


@dataclass(frozen=True)
class BoundConfig:
    """Bound parameters (order, beta, eps, tau) with admissibility lam <= 1 - beta."""

    order: DivergenceOrder
    beta: float
    eps: float
    tau: float

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise ValueError(f"beta must lie in (0, 1), got {self.beta}")
        if not 0.0 < self.eps < 1.0:
            raise ValueError(f"eps must lie in (0, 1), got {self.eps}")
        if not self.tau > 0.0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if self.order.lam > 1.0 - self.beta + 1e-12:
            raise InvalidOrderError(
                f"inadmissible pair: lam={self.order.lam} exceeds "
                f"1 - beta = {1.0 - self.beta}")


@dataclass(frozen=True, eq=False)
class RegretCertificate:
    """Assembled regret bound and the probability with which it holds.

    ``probability_floor`` is exact_product - exp(-tau n beta), clamped to 0
    (``vacuous`` set) when negative. ``simplified_floor`` is the looser
    closed form 1 - 2p exp(-n eps^2/7) - exp(-n tau beta), whose decay rate
    is ``kappa`` = min(eps^2/7, tau beta).
    """

    config: BoundConfig
    main_term: float
    bound: float
    probability_floor: float
    simplified_floor: float
    kappa: float
    vacuous: bool


def meets_minimums(coeffs: PenaltyCoefficients,
                   minimums: PenaltyCoefficients,
                   rtol: float = _COEFF_RTOL) -> bool:
    """True iff both coefficients reach their minimal values (to relative slack)."""
    return (coeffs.mu1 >= minimums.mu1 * (1.0 - rtol)
            and coeffs.mu2 >= minimums.mu2 * (1.0 - rtol))


def regret_main_term(prob: LassoProblem, theta_star: np.ndarray,
                     theta_hat: np.ndarray) -> float:
    """Value of the infimum in the regret bound, evaluated at the solver output.

    objective(theta_hat) - ||Y - X theta_star||^2 / (2 n sigma2) + mu2.
    """
    theta_star = np.asarray(theta_star, dtype=np.float64).reshape(-1)
    resid_star = prob.Y - prob.X @ theta_star
    baseline = float(resid_star @ resid_star) / (2.0 * prob.n * prob.sigma2)
    return objective(prob, theta_hat) - baseline + prob.coeffs.mu2


def regret_certificate(prob: LassoProblem, model: GaussianLinearModel,
                       config: BoundConfig,
                       theta_hat: Optional[np.ndarray] = None) -> RegretCertificate:
    """Regret bound main_term + tau and its probability floor.

    Solves the problem if ``theta_hat`` is not supplied.

    Raises
    ------
    InvalidCertificateError
        If the problem's penalty coefficients fall below ``min_coefficients``
        for (order, beta, eps), or the noise variances of problem and model
        disagree.
    """
    if abs(prob.sigma2 - model.sigma2) > 1e-9 * model.sigma2:
        raise InvalidCertificateError(
            f"problem sigma2={prob.sigma2} does not match model "
            f"sigma2={model.sigma2}")
    n, p = prob.n, prob.p
    minimums = min_coefficients(n, p, config.order, config.beta, config.eps,
                                prob.sigma2)
    if not meets_minimums(prob.coeffs, minimums):
        raise InvalidCertificateError(
            f"penalty coefficients ({prob.coeffs.mu1:.6g}, {prob.coeffs.mu2:.6g}) "
            f"fall below the required minimums "
            f"({minimums.mu1:.6g}, {minimums.mu2:.6g})")
    if theta_hat is None:
        theta_hat = solve(prob).theta_hat
    main = regret_main_term(prob, model.theta_star, theta_hat)

    triple = prob_lower_bounds(n, p, config.eps)
    tau_term = math.exp(-config.tau * n * config.beta)
    floor_raw = triple.exact_product - tau_term
    kappa = min(config.eps ** 2 / 7.0, config.tau * config.beta)
    simplified_raw = 1.0 - 2.0 * p * math.exp(-n * config.eps ** 2 / 7.0) \
        - math.exp(-n * config.tau * config.beta)
    return RegretCertificate(
        config=config,
        main_term=main,
        bound=main + config.tau,
        probability_floor=max(0.0, floor_raw),
        simplified_floor=max(0.0, simplified_raw),
        kappa=kappa,
        vacuous=floor_raw < 0.0 or triple.vacuous,
    )


@dataclass(frozen=True)
class RiskBoundEstimate:
    """Monte-Carlo estimate of the risk-bound right-hand side.

    ``value`` = mean main term over accepted (typical) draws + penalty_term.
    ``renyi_mean`` is the paired estimate of the conditional expected
    divergence at the solution, for checking value >= renyi_mean.
    """

    value: float
    std_error: float
    penalty_term: float
    accepted: int
    total: int
    renyi_mean: float
    renyi_std_error: float


def risk_bound_rhs(model: GaussianLinearModel, config: BoundConfig,
                   prob_generator: Callable[[np.random.Generator], LassoProblem],
                   num_mc: int, seed: int) -> RiskBoundEstimate:
    """Rejection-sampled estimate of the risk bound's right-hand side.

    ``prob_generator(rng)`` must return a fresh LassoProblem drawn under
    ``model``'s law; draws whose design is not eps-typical are discarded,
    which realizes the conditional expectation exactly.

    Raises
    ------
    InsufficientAcceptanceError
        If fewer than 10 draws are accepted.
    InvalidCertificateError
        If the typical-set bound is vacuous at the problem size (the
        closed-form penalty term would be undefined).
    """
    if num_mc < 100:
        raise ValueError(f"num_mc must be >= 100, got {num_mc}")
    mains = []
    renyis = []
    n = p = None
    for i in range(num_mc):
        prob = prob_generator(substream(seed, i))
        if abs(prob.sigma2 - model.sigma2) > 1e-9 * model.sigma2:
            raise InvalidCertificateError(
                "generated problem's sigma2 does not match the model")
        n, p = prob.n, prob.p
        if not is_typical(prob.X, model.cov, config.eps):
            continue
        report = solve(prob)
        mains.append(regret_main_term(prob, model.theta_star, report.theta_hat))
        renyis.append(renyi_div(model, report.theta_hat, config.order))
    accepted = len(mains)
    if accepted < 10:
        raise InsufficientAcceptanceError(
            f"only {accepted} of {num_mc} draws were eps-typical; "
            f"need at least 10")

    tail = 2.0 * math.exp(-sanov_exponent(n, config.eps, "upper"))
    if tail >= 1.0:
        raise InvalidCertificateError(
            f"typical-set bound is vacuous at n={n}, eps={config.eps}")
    penalty_term = -p * math.log1p(-tail) / (n * config.beta)

    mains_arr = np.asarray(mains)
    renyis_arr = np.asarray(renyis)
    se = float(np.std(mains_arr, ddof=1)) / math.sqrt(accepted) if accepted > 1 else 0.0
    renyi_se = float(np.std(renyis_arr, ddof=1)) / math.sqrt(accepted) \
        if accepted > 1 else 0.0
    return RiskBoundEstimate(
        value=float(np.mean(mains_arr)) + penalty_term,
        std_error=se,
        penalty_term=penalty_term,
        accepted=accepted,
        total=num_mc,
        renyi_mean=float(np.mean(renyis_arr)),
        renyi_std_error=renyi_se,
    )


def alpha_bound_at_probability(redundancy_estimate: float, beta: float,
                               a: AlphaOrder, p_typical: float) -> float:
    """Alpha-divergence risk bound evaluated at a given typical-set probability.

    redundancy / lam_a + P log(1/P) / (lam_a beta) + (1 - P) / (lam_a (lam_a + alpha))
    with lam_a = (1 - alpha)/2. At beta = (1 + alpha)/2 (the tightest
    admissible choice) the middle denominator equals lam_a (lam_a + alpha).
    """
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must lie in (0, 1), got {beta}")
    if not 0.0 < p_typical <= 1.0:
        raise ValueError(f"p_typical must lie in (0, 1], got {p_typical}")
    lam_a = (1.0 - a.alpha) / 2.0
    middle = p_typical * math.log(1.0 / p_typical) / (lam_a * beta)
    tail = (1.0 - p_typical) / (lam_a * (lam_a + a.alpha))
    return redundancy_estimate / lam_a + middle + tail


def alpha_risk_bound(redundancy_estimate: float, config: BoundConfig,
                     a: AlphaOrder, n: int, p: int) -> float:
    """Upper bound on the expected n-sample alpha-divergence.

    Substitutes the exact_product lower bound for the unavailable true
    typical-set probability; requires that bound to be >= 1/e so the
    substitution is conservative.

    Raises
    ------
    InvalidOrderError
        If alpha < 2 beta - 1 (the divergence order (1-alpha)/2 would exceed
        1 - beta).
    InvalidCertificateError
        If the exact_product bound falls below 1/e.
    """
    if a.alpha < 2.0 * config.beta - 1.0 - 1e-12:
        raise InvalidOrderError(
            f"alpha={a.alpha} is inadmissible for beta={config.beta}: "
            f"need alpha >= {2.0 * config.beta - 1.0}")
    p_typ = prob_lower_bounds(n, p, config.eps).exact_product
    if p_typ < math.exp(-1.0):
        raise InvalidCertificateError(
            f"exact_product bound {p_typ:.6g} is below 1/e; substituting it "
            f"for the true typical-set probability would not be conservative")
    return alpha_bound_at_probability(redundancy_estimate, config.beta, a, p_typ)


def hellinger_regret_bound(cert: RegretCertificate) -> float:
    """The certificate's bound read as an upper bound for twice the squared
    Hellinger distance.

    Valid only for certificates built at order 0.5, where the bounded
    divergence chain gives 2 d_H^2 <= d_0.5 <= bound.

    Raises
    ------
    InvalidOrderError
        If the certificate's order is not 0.5.
    """
    if abs(cert.config.order.lam - 0.5) > 1e-12:
        raise InvalidOrderError(
            f"certificate was built at order {cert.config.order.lam}, "
            f"need 0.5")
    return cert.bound
