"""Weighted-l1 lasso via proximal gradient descent.

Objective (per-sample normalization, the constant mu2 excluded since it does
not move the argmin):

    F(theta) = ||Y - X theta||^2 / (2 n sigma2) + mu1 sum_j w_j |theta_j|,

with the empirical column weights w_j = sqrt((1/n) sum_i x_ij^2). The solver
is plain ISTA with the exact Lipschitz step 1/L, L = lambda_max(X^T X) /
(n sigma2) obtained by power iteration, which makes every iteration a descent
step; FISTA is available behind a flag but disabled by default because it
gives up monotonicity. Optimality is certified by the subgradient (KKT)
residual, so "converged" is a checkable statement about the returned point
rather than about step sizes.
"""

from dataclasses import dataclass, field

import numpy as np

from .penalty import PenaltyCoefficients, empirical_weights, weighted_l1

DEFAULT_TOL = 1e-6
DEFAULT_MAX_ITER = 10_000
_POWER_ITERATIONS = 100
_POWER_TOL = 1e-10
_STEP_HEADROOM = 1e-6  # guards against power-iteration underestimating L


@dataclass(frozen=True, eq=False)
class LassoProblem:
    """Design, response, noise variance, and penalty coefficients."""

    X: np.ndarray
    Y: np.ndarray
    sigma2: float
    coeffs: PenaltyCoefficients
    w: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        X = np.asarray(self.X, dtype=np.float64)
        Y = np.asarray(self.Y, dtype=np.float64).reshape(-1)
        if X.ndim != 2:
            raise ValueError(f"X must be 2-D, got shape {X.shape}")
        if Y.shape[0] != X.shape[0]:
            raise ValueError(
                f"Y has {Y.shape[0]} entries but X has {X.shape[0]} rows")
        if not self.sigma2 > 0.0:
            raise ValueError(f"sigma2 must be positive, got {self.sigma2}")
        w = empirical_weights(X)  # rejects all-zero columns
        for name, val in (("X", X), ("Y", Y), ("w", w)):
            val.setflags(write=False)
            object.__setattr__(self, name, val)
        object.__setattr__(self, "sigma2", float(self.sigma2))

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True, eq=False)
class SolveReport:
    """Solver output with its optimality certificate.

    ``converged`` is True iff ``kkt_residual <= tol`` was reached within the
    iteration budget. ``objective_trace`` holds the objective at the start of
    every iteration plus the final value; with the default (non-accelerated)
    solver it is non-increasing.
    """

    theta_hat: np.ndarray
    objective_value: float
    iterations: int
    kkt_residual: float
    converged: bool
    objective_trace: np.ndarray


def objective(prob: LassoProblem, theta: np.ndarray) -> float:
    """F(theta); the additive constant mu2 is excluded."""
    theta = np.asarray(theta, dtype=np.float64).reshape(-1)
    if theta.shape[0] != prob.p:
        raise ValueError(f"theta has {theta.shape[0]} entries, expected {prob.p}")
    resid = prob.Y - prob.X @ theta
    fit = float(resid @ resid) / (2.0 * prob.n * prob.sigma2)
    return fit + prob.coeffs.mu1 * weighted_l1(theta, prob.w)


def soft_threshold(x, t):
    """sign(x) * max(|x| - t, 0); elementwise on arrays."""
    if np.any(np.asarray(t) < 0.0):
        raise ValueError("threshold must be non-negative")
    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


def _gradient(prob: LassoProblem, theta: np.ndarray) -> np.ndarray:
    return -(prob.X.T @ (prob.Y - prob.X @ theta)) / (prob.n * prob.sigma2)


def kkt_residual(prob: LassoProblem, theta: np.ndarray) -> float:
    """Max-norm violation of the subgradient optimality conditions.

    For active coordinates, |g_j + mu1 w_j sign(theta_j)|; for zero
    coordinates, max(|g_j| - mu1 w_j, 0). Zero exactly at a minimizer.
    """
    theta = np.asarray(theta, dtype=np.float64).reshape(-1)
    if theta.shape[0] != prob.p:
        raise ValueError(f"theta has {theta.shape[0]} entries, expected {prob.p}")
    g = _gradient(prob, theta)
    level = prob.coeffs.mu1 * prob.w
    active = theta != 0.0
    res_active = np.abs(g + level * np.sign(theta))
    res_zero = np.maximum(np.abs(g) - level, 0.0)
    return float(np.max(np.where(active, res_active, res_zero)))


def _lipschitz(prob: LassoProblem) -> float:
    """Largest eigenvalue of X^T X / (n sigma2) by power iteration."""
    rng = np.random.default_rng(0)  # fixed: the estimate is deterministic
    v = rng.standard_normal(prob.p)
    v /= np.linalg.norm(v)
    rho_prev = 0.0
    rho = 0.0
    for _ in range(_POWER_ITERATIONS):
        u = prob.X.T @ (prob.X @ v)
        rho = float(v @ u)
        norm_u = float(np.linalg.norm(u))
        if norm_u == 0.0:
            break
        v = u / norm_u
        if abs(rho - rho_prev) <= _POWER_TOL * max(1.0, abs(rho)):
            break
        rho_prev = rho
    return max(rho, 1e-300) / (prob.n * prob.sigma2)


def solve(prob: LassoProblem, tol: float = DEFAULT_TOL,
          max_iter: int = DEFAULT_MAX_ITER, accelerate: bool = False) -> SolveReport:
    """Minimize the objective from theta = 0 until the KKT residual <= tol.

    Non-convergence within ``max_iter`` is reported via the ``converged``
    flag, not raised.
    """
    if not tol > 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")
    L = _lipschitz(prob) * (1.0 + _STEP_HEADROOM)
    step = 1.0 / L
    level = step * prob.coeffs.mu1 * prob.w
    scale = prob.n * prob.sigma2

    theta = np.zeros(prob.p)
    momentum = theta
    t_acc = 1.0
    trace = []
    kkt = np.inf
    iterations = 0
    for iterations in range(max_iter):
        point = momentum if accelerate else theta
        resid = prob.Y - prob.X @ point
        g = -(prob.X.T @ resid) / scale
        if not accelerate:
            trace.append(float(resid @ resid) / (2.0 * scale)
                         + prob.coeffs.mu1 * weighted_l1(point, prob.w))
        kkt = _kkt_from_gradient(prob, point, g) if not accelerate \
            else kkt_residual(prob, theta)
        if kkt <= tol:
            break
        theta_next = soft_threshold(point - step * g, level)
        if accelerate:
            t_next = (1.0 + np.sqrt(1.0 + 4.0 * t_acc ** 2)) / 2.0
            momentum = theta_next + ((t_acc - 1.0) / t_next) * (theta_next - theta)
            t_acc = t_next
        theta = theta_next
    else:
        iterations = max_iter

    kkt = kkt_residual(prob, theta)
    obj = objective(prob, theta)
    trace.append(obj)
    return SolveReport(
        theta_hat=theta,
        objective_value=obj,
        iterations=iterations,
        kkt_residual=kkt,
        converged=kkt <= tol,
        objective_trace=np.asarray(trace),
    )


def _kkt_from_gradient(prob: LassoProblem, theta: np.ndarray,
                       g: np.ndarray) -> float:
    level = prob.coeffs.mu1 * prob.w
    active = theta != 0.0
    res_active = np.abs(g + level * np.sign(theta))
    res_zero = np.maximum(np.abs(g) - level, 0.0)
    return float(np.max(np.where(active, res_active, res_zero)))
