"""Last-iterate suboptimality bounds for SGD learning-rate schedules.

The library evaluates a last-iterate convergence bound for arbitrary
step-size schedules, tunes base learning rates and cooldown fractions
from it, transfers tuned settings across horizons, demonstrates the
cooldown loss drop on a small non-smooth problem, and prices loss
deltas with scaling-law arithmetic.
"""

from .bounds import (
    BoundCurve,
    BoundSpec,
    GradNormModel,
    MirrorSpec,
    best_iterate_bound,
    best_iterate_curve,
    best_iterate_optimal_gamma,
    best_iterate_terms,
    bound_curve,
    bound_terms,
    bound_value,
    constant_bound_exact,
    harmonic,
    harmonic_numbers,
    linear_decay_bound_exact,
    mirror_bound,
    optimal_gamma,
    polynomial_bound_approx,
    tuned_bound,
    wsd_bound_exact,
)
from .scaling import InfeasibleTargetError, ScalingLaw, params_for_delta, tokens_for_delta
from .schedules import CooldownShape, Schedule, cooldown_start, parse_spec, with_cooldown
from .toy import RunRecord, ToyProblem, comparison_runs, generate_problem, linf_subgradient, run_sgd
from .tuning import (
    FitResult,
    SweepResult,
    TransferResult,
    fit_inv_gamma_linear,
    fit_inv_sqrt,
    fit_polynomial,
    lr_transfer_curve,
    minimizer,
    sweep_cooldown,
    sweep_gamma,
    transfer_horizon_cooldown,
    transfer_horizon_rho,
)

__version__ = "0.1.0"

__all__ = [
    "BoundCurve",
    "BoundSpec",
    "CooldownShape",
    "FitResult",
    "GradNormModel",
    "InfeasibleTargetError",
    "MirrorSpec",
    "RunRecord",
    "ScalingLaw",
    "Schedule",
    "SweepResult",
    "ToyProblem",
    "TransferResult",
    "best_iterate_bound",
    "best_iterate_curve",
    "best_iterate_optimal_gamma",
    "best_iterate_terms",
    "bound_curve",
    "bound_terms",
    "bound_value",
    "comparison_runs",
    "constant_bound_exact",
    "cooldown_start",
    "fit_inv_gamma_linear",
    "fit_inv_sqrt",
    "fit_polynomial",
    "generate_problem",
    "harmonic",
    "harmonic_numbers",
    "linear_decay_bound_exact",
    "linf_subgradient",
    "lr_transfer_curve",
    "minimizer",
    "mirror_bound",
    "optimal_gamma",
    "params_for_delta",
    "parse_spec",
    "polynomial_bound_approx",
    "run_sgd",
    "sweep_cooldown",
    "sweep_gamma",
    "tokens_for_delta",
    "transfer_horizon_cooldown",
    "transfer_horizon_rho",
    "tuned_bound",
    "with_cooldown",
    "wsd_bound_exact",
]
