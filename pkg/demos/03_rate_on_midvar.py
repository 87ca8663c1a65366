"""
Convergence rate on a noisy allocation problem
==============================================

Runs MCSA on the ``feasible-easy-midvar`` preset over a grid of horizons
and fits the log-log slope of the mean optimality gap. Theory predicts
about -1/2. A reduced number of repeats keeps this to about a minute.
"""

import tempfile

from mcsa import ExperimentPlan, fit_summary, run_experiment

out = tempfile.mkdtemp(prefix="mcsa-rate-")
plan = ExperimentPlan(
    preset="feasible-easy-midvar",
    n_grid=[400, 1600, 6400],
    repeats=10,
    out_dir=out,
    write_traces=False,
    trace_stride=50,
)
summary = run_experiment(plan)

for row in summary.rows:
    print(f"N={row.N:>6}  gap {row.gap_mean:.4f}  [{row.gap_ci_low:.4f}, {row.gap_ci_high:.4f}]")

fit = fit_summary(summary.rows)["mcsa"]["gap"]
print(f"log-log slope {fit.slope:.3f}")
print("artifacts in", out)
