"""Risk/regret bound calculus for column-normalized lasso under Gaussian random design."""

from .bounds import (BoundConfig, RegretCertificate, RiskBoundEstimate,
                     alpha_bound_at_probability, alpha_risk_bound,
                     hellinger_regret_bound, regret_certificate,
                     regret_main_term, risk_bound_rhs)
from .divergences import (AlphaOrder, McEstimate, alpha_div, bhattacharyya,
                          hellinger_sq, kl_closed, renyi_mc)
from .lasso import (LassoProblem, SolveReport, kkt_residual, objective,
                    soft_threshold, solve)
from .matops import min_eigenvalue, sherman_morrison, sqrt_sym
from .model import (DivergenceOrder, GaussianLinearModel, TiltedGaussian,
                    displacement_energy, hessian_bound_gap, renyi_div,
                    renyi_div_n, renyi_grad, renyi_hess, tilt_scale, tilted)
from .penalty import (PenaltyCoefficients, QuantizerSpec, design_ratio,
                      empirical_weights, fixed_design_mu1, grid_codelength,
                      kraft_sum, min_coefficients, population_weights,
                      randomize_quantize, weighted_l1)
from .sim import (ExperimentConfig, ExperimentSummary, ProbCurvePoint,
                  TrialRecord, default_theta_star, prob_curve, run_experiment,
                  run_trial, snr_to_sigma2)
from .typical_set import (GammaTailResult, ProbBoundTriple, gamma_tail_check,
                          is_typical, prob_lower_bounds, sanov_exponent)

__version__ = "0.1.0"

__all__ = [
    "AlphaOrder", "BoundConfig", "DivergenceOrder", "ExperimentConfig",
    "ExperimentSummary", "GammaTailResult", "GaussianLinearModel",
    "LassoProblem", "McEstimate", "PenaltyCoefficients", "ProbBoundTriple",
    "ProbCurvePoint", "QuantizerSpec", "RegretCertificate",
    "RiskBoundEstimate", "SolveReport", "TiltedGaussian", "TrialRecord",
    "alpha_bound_at_probability", "alpha_div", "alpha_risk_bound",
    "bhattacharyya", "default_theta_star", "design_ratio",
    "displacement_energy", "empirical_weights", "fixed_design_mu1",
    "gamma_tail_check", "grid_codelength", "hellinger_regret_bound",
    "hellinger_sq", "hessian_bound_gap", "is_typical", "kkt_residual",
    "kl_closed", "kraft_sum", "min_coefficients", "min_eigenvalue",
    "objective", "population_weights", "prob_curve", "prob_lower_bounds",
    "randomize_quantize", "regret_certificate", "regret_main_term",
    "renyi_div", "renyi_div_n", "renyi_grad", "renyi_hess", "renyi_mc",
    "risk_bound_rhs", "run_experiment", "run_trial", "sanov_exponent",
    "sherman_morrison", "snr_to_sigma2", "soft_threshold", "solve",
    "sqrt_sym", "tilt_scale", "tilted", "weighted_l1",
]
