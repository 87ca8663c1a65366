"""Empirical checks of the assumptions and guarantees behind MCSA."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..core import StochasticProblem, stream
from ..mirror import default_mirror, lemma1_check
from ..solver import SolverConfig, solve
from .rates import rate_fit


def second_moments(problem: StochasticProblem, x, n: int, rng) -> np.ndarray:
    """Monte Carlo ``E |F'(x)|^2`` followed by ``E |G_j'(x)|^2`` for each j."""
    out = []
    for oracle in [problem.objective, *problem.constraints]:
        _, grads = oracle.sample_many(x, rng, n)
        out.append(float(np.mean(np.sum(grads**2, axis=1))))
    return np.array(out)


def sup_deviation(oracle, truth, grid: np.ndarray, L: int, rng) -> float:
    """``max_{x in grid} |G_hat(x) - g(x)|`` for one fresh pool of ``L`` draws."""
    pool = oracle.pool()
    pool.add(rng, L)
    return max(abs(pool.mean(x) - truth(x)) for x in grid)


def sup_deviation_curve(oracle, truth, grid, sizes, repeats: int, seed: int):
    """Mean grid sup-deviation for each pool size and the log-log slope against L."""
    rng = stream(seed, "sup-deviation")
    values = np.array(
        [np.mean([sup_deviation(oracle, truth, grid, L, rng) for _ in range(repeats)]) for L in sizes]
    )
    fit = rate_fit(sizes, values)
    return values, (fit.slope if fit else float("nan"))


@dataclass
class DiagnosticReport:
    b_fractions: np.ndarray
    empty_B_runs: int
    second_moments: np.ndarray
    second_moments_analytic: Optional[np.ndarray]
    sup_dev_sizes: tuple
    sup_dev_values: np.ndarray
    sup_dev_slope: float
    lemma1_failures: int
    lemma1_trials: int

    @property
    def lemma1_pass_rate(self) -> float:
        return 1.0 - self.lemma1_failures / self.lemma1_trials if self.lemma1_trials else float("nan")

    def lines(self) -> list[str]:
        out = [
            f"|B|/N over {len(self.b_fractions)} repeats: mean {self.b_fractions.mean():.4f}, "
            f"min {self.b_fractions.min():.4f}; empty B in {self.empty_B_runs} runs",
        ]
        names = ["objective"] + [f"constraint {j}" for j in range(1, len(self.second_moments))]
        for i, name in enumerate(names):
            line = f"E|grad|^2 {name}: empirical {self.second_moments[i]:.4f}"
            if self.second_moments_analytic is not None:
                line += f", analytic {self.second_moments_analytic[i]:.4f}"
            out.append(line)
        if self.second_moments_analytic is not None:
            out.append(f"M^2 (analytic max) = {self.second_moments_analytic.max():.4f}")
        if len(self.sup_dev_sizes):
            devs = ", ".join(f"L={L}: {v:.3g}" for L, v in zip(self.sup_dev_sizes, self.sup_dev_values))
            out.append(f"estimator sup-deviation {devs}; slope {self.sup_dev_slope:.3f}")
        out.append(
            f"prox three-point inequality: {self.lemma1_trials - self.lemma1_failures}/"
            f"{self.lemma1_trials} passed"
        )
        return out


def diagnose(
    problem: StochasticProblem,
    config: SolverConfig,
    repeats: int = 10,
    moment_draws: int = 10_000,
    sup_dev_sizes=(100, 1_000, 10_000, 100_000),
    sup_dev_repeats: int = 10,
    grid_points: int = 100,
    lemma1_trials: int = 10_000,
) -> DiagnosticReport:
    """Run the solver ``repeats`` times (seeds ``config.seed + i``) and collect diagnostics.

    The sup-deviation curve is computed for the first constraint and needs
    analytic constraint values; it is skipped otherwise.
    """
    seed = config.seed
    results = [solve(problem, dataclasses.replace(config, seed=seed + i)) for i in range(repeats)]
    b_fractions = np.array([r.b_fraction for r in results])

    x_ref = problem.domain.center()
    moments = second_moments(problem, x_ref, moment_draws, stream(seed, "second-moments"))

    sizes, values, slope = (), np.array([]), float("nan")
    if problem.m and problem.constraints_fn is not None and sup_dev_sizes:
        grid = problem.domain.sample(stream(seed, "diagnostic-grid"), grid_points)
        truth = lambda x: float(problem.constraints_fn(x)[0])  # noqa: E731
        sizes = tuple(sup_dev_sizes)
        values, slope = sup_deviation_curve(problem.constraints[0], truth, grid, sizes, sup_dev_repeats, seed)

    mirror = config.mirror or default_mirror(problem.domain)
    failures = lemma1_check(mirror, problem.domain, lemma1_trials, stream(seed, "lemma1"))
    return DiagnosticReport(
        b_fractions=b_fractions,
        empty_B_runs=sum(not r.B for r in results),
        second_moments=moments,
        second_moments_analytic=problem.second_moments,
        sup_dev_sizes=sizes,
        sup_dev_values=values,
        sup_dev_slope=slope,
        lemma1_failures=failures,
        lemma1_trials=lemma1_trials,
    )
