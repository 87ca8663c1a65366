"""Experiment plans, seeded batch runs, rate fits, diagnostics and the CLI."""

from .diagnostics import DiagnosticReport, diagnose
from .experiment import RunSummary, run_algorithm, run_experiment
from .plan import ALGORITHMS, ExperimentPlan, dump_plan, load_plan
from .rates import RateFit, fit_summary, rate_fit

__all__ = [
    "ALGORITHMS", "DiagnosticReport", "ExperimentPlan", "RateFit", "RunSummary",
    "diagnose", "dump_plan", "fit_summary", "load_plan", "rate_fit", "run_algorithm",
    "run_experiment",
]
