"""Repeated seeded runs, CSV artifacts and decay-curve plots."""

from __future__ import annotations

import csv
import logging
import math
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from ..baseline import DPPConfig, dpp_solve
from ..mirror import ScaledEuclidean, diameter_sq
from ..solver import SolveResult, SolverConfig, build_schedule, solve
from ..synthetic import make_problem
from .plan import ExperimentPlan, dump_plan

log = logging.getLogger(__name__)

Z95 = 1.96

SUMMARY_FIELDS = [
    "algorithm", "N", "runs", "failed", "empty_B",
    "gap_mean", "gap_ci_low", "gap_ci_high",
    "violation_mean", "violation_ci_low", "violation_ci_high",
    "b_fraction_mean",
]
RUN_FIELDS = ["run_id", "algorithm", "N", "repeat", "seed", "status", "gap", "violation", "b_fraction", "error"]
CURVE_FIELDS = ["algorithm", "N", "t", "gap_mean", "gap_ci_low", "gap_ci_high"]


def fmt(value) -> str:
    """CSV cell text; floats keep 17 significant digits."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


# --------------------------------------------------------------------------
# Single runs
# --------------------------------------------------------------------------


def solver_config(plan: ExperimentPlan, algorithm: str, N: int, seed: int, problem) -> SolverConfig:
    """MCSA configuration for ``algorithm`` in {"mcsa", "mcsa-online"}."""
    mirror = ScaledEuclidean(1.0)
    if plan.schedule == "appendix":
        D_X = plan.D_X if plan.D_X is not None else math.sqrt(diameter_sq(mirror, problem.domain))
        schedule = build_schedule("appendix", N, M=plan.M, D_X=D_X)
    else:
        schedule = build_schedule("theorem", N, K1=plan.K1, K2=plan.K2)
    return SolverConfig(
        N=N, schedule=schedule, x1=np.full(problem.dimension, plan.x1), L=plan.L, s=plan.s,
        estimator="online" if algorithm == "mcsa-online" else "batch",
        seed=seed, mirror=mirror, trace_stride=plan.trace_stride,
    )


def run_algorithm(plan: ExperimentPlan, algorithm: str, N: int, seed: int, problem=None) -> SolveResult:
    """Solve the plan's problem once with one algorithm, horizon and seed."""
    problem = problem or make_problem(plan.spec)
    if algorithm == "dpp":
        cfg = DPPConfig(N=N, x1=np.full(problem.dimension, plan.x1), V=plan.dpp_V, alpha=plan.dpp_alpha,
                        s=plan.s, seed=seed, trace_stride=plan.trace_stride)
        return dpp_solve(problem, cfg)
    return solve(problem, solver_config(plan, algorithm, N, seed, problem))


@dataclass
class RunRecord:
    run_id: str
    algorithm: str
    N: int
    repeat: int
    seed: int
    status: str
    gap: Optional[float] = None
    violation: Optional[float] = None
    b_fraction: Optional[float] = None
    elapsed: Optional[float] = None
    curve_t: Optional[np.ndarray] = None
    curve_gap: Optional[np.ndarray] = None
    error: str = ""

    @property
    def ok(self) -> bool:
        return not self.error


def run_id(algorithm: str, N: int, repeat: int) -> str:
    return f"{algorithm}-N{N}-r{repeat:04d}"


def trace_rows(result: SolveResult, rid: str, algorithm: str, coords: bool = True):
    for rec in result.trace:
        row = [rid, algorithm, rec.t, rec.in_B, rec.direction_label, rec.gamma]
        if coords:
            row.extend(rec.x.tolist())
        if rec.gap is not None:
            row.append(rec.gap)
        if rec.violations is not None:
            row.extend(rec.violations.tolist())
        yield row


def trace_header(d: int, m: int, coords: bool = True, truth: bool = True) -> list:
    header = ["run_id", "algorithm", "t", "in_B", "direction", "gamma_t"]
    if coords:
        header += [f"x_{i}" for i in range(d)]
    if truth:
        header += ["gap"] + [f"violation_{j}" for j in range(1, m + 1)]
    return header


def _execute(task):
    plan, algorithm, N, repeat, trace_dir = task
    seed = plan.seed + repeat
    rid = run_id(algorithm, N, repeat)
    try:
        problem = make_problem(plan.spec)
        result = run_algorithm(plan, algorithm, N, seed, problem)
        gap = problem.gap(result.x_hat)
        viol = problem.violations(result.x_hat)
        violation = float(np.max(np.maximum(viol, 0.0))) if viol is not None and viol.size else 0.0
        curve_t = np.array([r.t for r in result.trace])
        curve_gap = np.array([r.gap for r in result.trace], dtype=float) if problem.has_truth else None
        if trace_dir is not None:
            _write_csv(
                Path(trace_dir) / f"{rid}.csv",
                trace_header(problem.dimension, problem.m, plan.trace_coords, problem.has_truth),
                trace_rows(result, rid, algorithm, plan.trace_coords),
            )
        return RunRecord(rid, algorithm, N, repeat, seed, result.status.value, gap, violation,
                         result.b_fraction, result.elapsed, curve_t, curve_gap)
    except Exception as exc:  # noqa: BLE001 - one failed run must not abort the batch
        log.exception("run %s failed", rid)
        return RunRecord(rid, algorithm, N, repeat, seed, "error", error=f"{type(exc).__name__}: {exc}")


# --------------------------------------------------------------------------
# Aggregation
# --------------------------------------------------------------------------


def mean_ci(values) -> tuple:
    """Mean and normal 95% interval ``mean +- 1.96 s / sqrt(n)``; NaN width for n < 2."""
    values = np.asarray(values, dtype=float)
    n = values.size
    if n == 0:
        return math.nan, math.nan, math.nan
    mean = float(np.mean(values))
    if n < 2:
        return mean, math.nan, math.nan
    half = Z95 * float(np.std(values, ddof=1)) / math.sqrt(n)
    return mean, mean - half, mean + half


@dataclass
class SummaryRow:
    algorithm: str
    N: int
    runs: int
    failed: int
    empty_B: int
    gap_mean: float
    gap_ci_low: float
    gap_ci_high: float
    violation_mean: float
    violation_ci_low: float
    violation_ci_high: float
    b_fraction_mean: float
    time_mean: float = math.nan

    def as_row(self):
        return [getattr(self, name) for name in SUMMARY_FIELDS]


@dataclass
class RunSummary:
    rows: list
    runs: list
    curves: dict = field(default_factory=dict)  # (algorithm, N) -> (t, mean, low, high)
    out_dir: Optional[Path] = None

    def row(self, algorithm: str, N: int) -> SummaryRow:
        for r in self.rows:
            if r.algorithm == algorithm and r.N == N:
                return r
        raise KeyError((algorithm, N))

    def records(self, algorithm: str, N: int) -> list:
        return sorted(
            (r for r in self.runs if r.algorithm == algorithm and r.N == N and r.ok),
            key=lambda r: r.repeat,
        )


def summarize(runs: list, algorithms, n_grid) -> RunSummary:
    rows, curves = [], {}
    for algorithm in algorithms:
        for N in n_grid:
            group = [r for r in runs if r.algorithm == algorithm and r.N == N]
            ok = sorted((r for r in group if r.ok), key=lambda r: r.repeat)
            gaps = [r.gap for r in ok if r.gap is not None]
            viols = [r.violation for r in ok if r.violation is not None]
            rows.append(
                SummaryRow(
                    algorithm, N, len(ok), len(group) - len(ok),
                    sum(r.status == "empty-B" for r in ok),
                    *mean_ci(gaps), *mean_ci(viols),
                    float(np.mean([r.b_fraction for r in ok])) if ok else math.nan,
                    float(np.mean([r.elapsed for r in ok])) if ok else math.nan,
                )
            )
            with_curves = [r for r in ok if r.curve_gap is not None]
            if with_curves:
                stack = np.vstack([r.curve_gap for r in with_curves])
                mean = stack.mean(axis=0)
                if stack.shape[0] > 1:
                    half = Z95 * stack.std(axis=0, ddof=1) / math.sqrt(stack.shape[0])
                else:
                    half = np.full_like(mean, math.nan)
                curves[(algorithm, N)] = (with_curves[0].curve_t, mean, mean - half, mean + half)
    return RunSummary(rows, runs, curves)


# --------------------------------------------------------------------------
# Entry point
# --------------------------------------------------------------------------


def _check_writable(out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    with tempfile.NamedTemporaryFile(dir=out_dir, prefix=".probe-"):
        pass


def run_experiment(plan: ExperimentPlan) -> RunSummary:
    """Run every (algorithm, N, repeat) of the plan and write its artifacts.

    Writes ``plan.yaml``, ``runs.csv``, ``summary.csv``, ``curves.csv`` and
    ``timings.csv`` under ``plan.out_dir``, one trace CSV per run under
    ``traces/`` when ``write_traces`` is set, and decay plots when ``plot`` is
    set. Repeat ``i`` always uses seed ``plan.seed + i``, so the output does not
    depend on the number of workers. Raises OSError before any computation if
    the output directory cannot be written.
    """
    out = Path(plan.out_dir)
    _check_writable(out)
    trace_dir = None
    if plan.write_traces:
        trace_dir = out / "traces"
        trace_dir.mkdir(exist_ok=True)
    dump_plan(plan, out / "plan.yaml")

    tasks = [
        (plan, algorithm, N, repeat, trace_dir)
        for algorithm in plan.algorithms
        for N in plan.n_grid
        for repeat in range(plan.repeats)
    ]
    if plan.workers > 1:
        with ProcessPoolExecutor(max_workers=plan.workers) as pool:
            runs = list(pool.map(_execute, tasks))
    else:
        runs = [_execute(task) for task in tasks]

    summary = summarize(runs, plan.algorithms, plan.n_grid)
    summary.out_dir = out
    write_artifacts(summary, out)
    if plan.plot:
        from .plots import plot_decay

        plot_decay(out / "curves.csv", out)
    return summary


def write_artifacts(summary: RunSummary, out: Path) -> None:
    _write_csv(out / "summary.csv", SUMMARY_FIELDS, (r.as_row() for r in summary.rows))
    _write_csv(
        out / "runs.csv", RUN_FIELDS,
        ([r.run_id, r.algorithm, r.N, r.repeat, r.seed, r.status, r.gap, r.violation, r.b_fraction, r.error]
         for r in summary.runs),
    )
    # wall times vary between runs, so they stay out of summary.csv
    _write_csv(out / "timings.csv", ["run_id", "elapsed_s"], ([r.run_id, r.elapsed] for r in summary.runs))

    def curve_rows():
        for (algorithm, N), (t, mean, low, high) in summary.curves.items():
            for i in range(len(t)):
                yield [algorithm, N, int(t[i]), mean[i], low[i], high[i]]

    _write_csv(out / "curves.csv", CURVE_FIELDS, curve_rows())


def read_csv(path) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))

