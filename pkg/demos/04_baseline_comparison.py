"""
MCSA against a drift-plus-penalty baseline
==========================================

Paired runs (same seed per repeat) on the hard high-variance preset, where
the constraint means sit just below zero and the noise is large.
"""

import tempfile

from mcsa import ExperimentPlan, run_experiment

N = 10_000
plan = ExperimentPlan(
    preset="feasible-hard-highvar",
    algorithms=["mcsa", "mcsa-online", "dpp"],
    n_grid=[N],
    repeats=5,
    out_dir=tempfile.mkdtemp(prefix="mcsa-cmp-"),
    write_traces=False,
    trace_stride=500,
    plot=True,
)
summary = run_experiment(plan)

for algorithm in plan.algorithms:
    row = summary.row(algorithm, N)
    print(f"{algorithm:<12} gap {row.gap_mean:8.3f}  violation {row.violation_mean:.3g}")

wins = sum(a.gap <= b.gap for a, b in zip(summary.records("mcsa", N), summary.records("dpp", N)))
print(f"mcsa beats dpp in {wins}/{plan.repeats} paired repeats")
print("decay plot:", summary.out_dir / f"decay_N{N}.png")
