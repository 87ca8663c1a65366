"""
When the constraint mean is positive
====================================

With ``mu = 0.2`` the only feasible point is the origin, while the iterates
start at 0.5. The averaging set B stays a small fraction of the run, and
the objective sits far from the optimum of the feasible problem.
"""

import numpy as np

from mcsa import make_problem, preset
from mcsa.harness import run_algorithm

plan = preset("infeasible")
problem = make_problem(plan.spec)

fractions = []
for seed in range(3):
    result = run_algorithm(plan, "mcsa", 10_000, seed, problem)
    fractions.append(result.b_fraction)
    print(f"seed {seed}: |B|/N = {result.b_fraction:.3f}, sum(x_hat) = {result.x_hat.sum():.2f}, "
          f"max violation {problem.violations(result.x_hat).max():.3f}")

print("mean |B|/N:", np.mean(fractions))
