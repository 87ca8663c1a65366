"""Multiple cooperative stochastic approximation (MCSA).

At each iteration the constraint values are estimated from frozen samples.
If every estimate is within tolerance the iterate moves along a stochastic
objective subgradient, otherwise along the subgradient of a uniformly chosen
violated constraint. The returned point is the step-weighted average of the
post burn-in iterates whose estimates all passed.
"""

from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import (
    OBJECTIVE,
    Box,
    ConfigurationError,
    StochasticProblem,
    Streams,
    TraceRecord,
    as_point,
    membership,
    selection_rule,
)
from .mirror import MirrorMap, default_mirror

FULL_TRACE_LIMIT = 10**6


class Status(str, enum.Enum):
    CONVERGED_AVERAGED = "converged-averaged"
    EMPTY_B = "empty-B"
    ITERATION_CAP_REACHED = "iteration-cap-reached"


class Estimator(str, enum.Enum):
    BATCH = "batch"
    ONLINE = "online"


@dataclass(frozen=True)
class Schedule:
    """Step sizes ``gamma(t)`` and tolerances ``eta(j, t)``; ``t`` and ``j`` are 1-based."""

    gamma: Callable[[int], float]
    eta: Callable[[int, int], float]
    params: dict = field(default_factory=dict)

    @classmethod
    def constant(cls, gamma: float, eta: float, **params) -> "Schedule":
        if gamma <= 0 or eta <= 0:
            raise ConfigurationError("step size and tolerance must be positive")
        return cls(lambda t: gamma, lambda j, t: eta, dict(params, gamma=gamma, eta=eta))

    def eta_vector(self, t: int, m: int) -> np.ndarray:
        return np.array([self.eta(j, t) for j in range(1, m + 1)], dtype=float)


def build_schedule(kind: str, N: int, **params) -> Schedule:
    """Constant schedules for a horizon of ``N`` iterations.

    ``kind="theorem"`` takes ``K1, K2`` and gives ``gamma = sqrt(2) K1 / sqrt(N)``,
    ``eta = sqrt(2) K2 / sqrt(N)``. ``kind="appendix"`` takes ``M, D_X`` and
    gives ``gamma = D_X / (M sqrt(N))``, ``eta = M^2 / sqrt(N)``.
    """
    if N < 1:
        raise ConfigurationError(f"N must be >= 1, got {N}")
    for key, value in params.items():
        if not value > 0:
            raise ConfigurationError(f"schedule parameter {key} must be positive, got {value}")
    root = math.sqrt(N)
    if kind == "theorem":
        K1, K2 = params["K1"], params["K2"]
        return Schedule.constant(
            math.sqrt(2) * K1 / root, math.sqrt(2) * K2 / root, kind=kind, K1=K1, K2=K2, N=N
        )
    if kind == "appendix":
        M, D_X = params["M"], params["D_X"]
        return Schedule.constant(D_X / (M * root), M**2 / root, kind=kind, M=M, D_X=D_X, N=N)
    raise ConfigurationError(f"unknown schedule kind {kind!r}")


@dataclass
class SolverConfig:
    N: int
    schedule: Schedule
    x1: np.ndarray
    L: Optional[int] = None  # defaults to N
    s: int = 1
    estimator: Estimator = Estimator.BATCH
    seed: int = 0
    mirror: Optional[MirrorMap] = None
    trace_stride: Optional[int] = None

    def __post_init__(self):
        self.estimator = Estimator(self.estimator)
        if self.L is None:
            self.L = self.N
        if self.N < 1:
            raise ConfigurationError("N must be >= 1")
        if self.L < 1:
            raise ConfigurationError("L must be >= 1")
        if not 1 <= self.s <= self.N:
            raise ConfigurationError("burn-in must satisfy 1 <= s <= N")
        if self.trace_stride is None:
            self.trace_stride = max(1, math.ceil(self.N / FULL_TRACE_LIMIT))
        self.x1 = as_point(self.x1)


@dataclass
class SolveResult:
    x_hat: np.ndarray
    status: Status
    B: list
    trace: list
    elapsed: float
    N: int = 0

    @property
    def certified(self) -> bool:
        return self.status != Status.EMPTY_B

    @property
    def b_fraction(self) -> float:
        return len(self.B) / self.N if self.N else 0.0


class ConstraintEstimator:
    """Sample-average estimates of all constraint values.

    In batch mode a pool of ``L`` draws per constraint is frozen before the
    first iteration and reused. In online mode one draw is appended per
    iteration and the estimate at iteration ``t`` averages the first ``t``.
    """

    def __init__(self, problem: StochasticProblem, mode, L: int, streams: Streams):
        self.mode = Estimator(mode)
        self.streams = streams
        self.pools = [oracle.pool() for oracle in problem.constraints]
        if self.mode is Estimator.BATCH:
            for pool, rng in zip(self.pools, streams.estimator):
                pool.add(rng, L)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        if self.mode is Estimator.ONLINE:
            for pool, rng in zip(self.pools, self.streams.estimator):
                pool.add(rng, 1)
        return np.array([pool.mean(x) for pool in self.pools], dtype=float)


def estimate_constraints(problem: StochasticProblem, x, estimator: ConstraintEstimator):
    """Estimated ``g_j(x)`` for every constraint; advances an online estimator by one draw."""
    return estimator(np.asarray(x, dtype=float))


def mcsa_step(
    problem: StochasticProblem,
    x: np.ndarray,
    G_hat: np.ndarray,
    schedule: Schedule,
    t: int,
    streams: Streams,
    mirror: Optional[MirrorMap] = None,
):
    """One cooperative step. Returns ``(x_next, direction)``."""
    mirror = mirror or default_mirror(problem.domain)
    eta = schedule.eta_vector(t, problem.m)
    violated = np.flatnonzero(G_hat > eta)
    if violated.size == 0:
        _, h = problem.objective(x, streams.objective)
        direction = OBJECTIVE
    else:
        j = int(violated[streams.tie_break.integers(violated.size)])
        _, h = problem.constraints[j](x, streams.constraint[j])
        direction = j + 1
    return mirror.project(problem.domain, x, schedule.gamma(t) * h), direction


def solve(problem: StochasticProblem, config: SolverConfig) -> SolveResult:
    """Run MCSA for ``config.N`` iterations."""
    start = time.perf_counter()
    mirror = config.mirror or default_mirror(problem.domain)
    x = as_point(config.x1, problem.dimension)
    if not membership(problem.domain, x):
        raise ConfigurationError("initial point is outside the domain")
    streams = Streams(config.seed, problem.m)
    estimator = ConstraintEstimator(problem, config.estimator, config.L, streams)

    weighted = np.zeros_like(x)
    weight = 0.0
    B = []
    trace = []
    for t in range(1, config.N + 1):
        G_hat = estimator(x)
        eta = config.schedule.eta_vector(t, problem.m)
        gamma = config.schedule.gamma(t)
        in_B = selection_rule(t, config.s, G_hat, eta)
        if in_B:
            B.append(t)
            weighted += gamma * x
            weight += gamma
        x_next, direction = mcsa_step(problem, x, G_hat, config.schedule, t, streams, mirror)
        if (t - 1) % config.trace_stride == 0 or t == config.N:
            trace.append(
                TraceRecord(
                    t=t,
                    x=x,
                    G_hat=G_hat,
                    eta=eta,
                    direction=direction,
                    in_B=in_B,
                    gamma=gamma,
                    gap=problem.gap(x),
                    violations=problem.violations(x),
                )
            )
        x = x_next

    if B:
        x_hat = weighted / weight
        if isinstance(problem.domain, Box):
            # a convex combination can overshoot a bound by one ulp
            x_hat = np.clip(x_hat, problem.domain.lower, problem.domain.upper)
        status = Status.CONVERGED_AVERAGED
    else:
        # uncertified: no iterate passed the tolerance test
        x_hat = trace[-1].x
        status = Status.EMPTY_B
    return SolveResult(x_hat, status, B, trace, time.perf_counter() - start, config.N)
