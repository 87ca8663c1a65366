"""
Checking the assumptions empirically
====================================

``diagnose`` repeats a run, then compares empirical and analytic second
moments, measures how fast the sample-average constraint estimate
approaches its mean, and samples the three-point inequality behind every
prox step.
"""

from mcsa import diagnose, make_problem, preset
from mcsa.harness.experiment import solver_config

plan = preset("feasible-easy-lowvar")
problem = make_problem(plan.spec)
config = solver_config(plan, "mcsa", 2000, seed=0, problem=problem)

report = diagnose(problem, config, repeats=3, sup_dev_sizes=(100, 1000, 10_000), sup_dev_repeats=5)
for line in report.lines():
    print(line)
