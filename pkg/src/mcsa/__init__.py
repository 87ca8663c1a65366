"""Multiple cooperative stochastic approximation for expectation-constrained
stochastic convex optimisation."""

from .baseline import DPPConfig, QueueState, dpp_solve, dpp_step
from .core import (
    Box,
    ConfigurationError,
    Oracle,
    ProductOfSimplexes,
    StochasticProblem,
    TraceRecord,
    membership,
    stream,
)
from .mirror import NegativeEntropy, ScaledEuclidean, bregman, diameter_sq, prox_project
from .solver import (
    Estimator,
    Schedule,
    SolveResult,
    SolverConfig,
    Status,
    build_schedule,
    estimate_constraints,
    mcsa_step,
    solve,
)
from .synthetic import GaussianLinearSpec, analytic_optimum, make_problem, preset, preset_names, presets
from .harness import ExperimentPlan, diagnose, fit_summary, rate_fit, run_algorithm, run_experiment

__version__ = "0.1.0"
