"""
MCSA on a one-dimensional toy
=============================

``min x  s.t. 0.5 - x <= 0`` on ``[0, 1]``, with no noise. Iterates that
pass the constraint test step along the objective and enter the averaging
set B; the others step along the violated constraint.
"""

import numpy as np

from mcsa import Box, Oracle, Schedule, SolverConfig, StochasticProblem, solve

problem = StochasticProblem(
    domain=Box.unit(1),
    objective=Oracle(lambda x, rng: (float(x[0]), np.array([1.0]))),
    constraints=[Oracle(lambda x, rng: (0.5 - float(x[0]), np.array([-1.0])))],
    objective_fn=lambda x: float(x[0]),
    constraints_fn=lambda x: np.array([0.5 - x[0]]),
    x_star=np.array([0.5]),
    f_star=0.5,
)

config = SolverConfig(N=40, schedule=Schedule.constant(0.1, 0.05), x1=np.array([0.0]), L=1)
result = solve(problem, config)

for rec in result.trace[:12]:
    print(f"t={rec.t:2d} x={rec.x[0]:.3f} G_hat={rec.G_hat[0]:+.3f} {rec.direction_label:<12} in_B={rec.in_B}")

# the certified point is the step-weighted average over B
print("status:", result.status.value, "|B| =", len(result.B))
print("x_hat =", result.x_hat[0], "gap =", problem.gap(result.x_hat))
