"""Drift-plus-penalty comparator for stochastically constrained problems.

Each step descends ``V * F'(x_t) + sum_j Q_j G_j'(x_t)`` with a proximal
term ``alpha * |z - x_t|^2``, then pushes each virtual queue by a fresh
sample of its constraint at the new point:
``Q_j <- max(Q_j + G_j(x_{t+1}, xi'), 0)``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Optional

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
)
from .mirror import ScaledEuclidean
from .solver import FULL_TRACE_LIMIT, SolveResult, Status


@dataclass
class QueueState:
    Q: np.ndarray

    def __post_init__(self):
        self.Q = np.asarray(self.Q, dtype=float)
        if np.any(self.Q < 0):
            raise ValueError("virtual queues must be nonnegative")

    @classmethod
    def empty(cls, m: int) -> "QueueState":
        return cls(np.zeros(m))


@dataclass
class DPPConfig:
    N: int
    x1: np.ndarray
    V: Optional[float] = None  # defaults to sqrt(N)
    alpha: Optional[float] = None  # defaults to N
    s: int = 1
    seed: int = 0
    trace_stride: Optional[int] = None

    def __post_init__(self):
        if self.N < 1:
            raise ConfigurationError("N must be >= 1")
        if self.V is None:
            self.V = math.sqrt(self.N)
        if self.alpha is None:
            self.alpha = float(self.N)
        if not (self.V > 0 and self.alpha > 0):
            raise ConfigurationError("V and alpha must be positive")
        if not 1 <= self.s <= self.N:
            raise ConfigurationError("burn-in must satisfy 1 <= s <= N")
        if self.trace_stride is None:
            self.trace_stride = max(1, math.ceil(self.N / FULL_TRACE_LIMIT))
        self.x1 = as_point(self.x1)


class _DPPStreams(Streams):
    def __post_init__(self):
        super().__post_init__()
        self.queue = [self.named(f"queue-{j}") for j in range(self.m)]


def dpp_step(problem: StochasticProblem, x, queues: QueueState, V: float, alpha: float, streams):
    """One drift-plus-penalty update.

    Returns ``(x_next, queues_next, G_sample)`` where ``G_sample`` holds the
    constraint values ``G_j(x, xi_j)`` drawn together with the subgradients.
    """
    if not isinstance(problem.domain, Box):
        raise ConfigurationError("drift-plus-penalty is only defined on box domains")
    _, grad = problem.objective(x, streams.objective)
    direction = V * grad
    G_sample = np.empty(problem.m)
    for j, oracle in enumerate(problem.constraints):
        G_sample[j], g = oracle(x, streams.constraint[j])
        direction = direction + queues.Q[j] * g
    if alpha >= 0.5:
        x_next = ScaledEuclidean(alpha).project(problem.domain, x, direction)
    else:
        # same closed form; ScaledEuclidean itself insists on alpha >= 1/2
        x_next = np.clip(x - direction / (2.0 * alpha), problem.domain.lower, problem.domain.upper)
    pushed = np.array(
        [oracle(x_next, streams.queue[j])[0] for j, oracle in enumerate(problem.constraints)]
    )
    return x_next, QueueState(np.maximum(queues.Q + pushed, 0.0)), G_sample


def dpp_solve(problem: StochasticProblem, config: DPPConfig) -> SolveResult:
    """Run ``config.N`` steps and return the uniform average of ``x_s..x_N``."""
    start = time.perf_counter()
    x = as_point(config.x1, problem.dimension)
    if not membership(problem.domain, x):
        raise ConfigurationError("initial point is outside the domain")
    streams = _DPPStreams(config.seed, problem.m)
    queues = QueueState.empty(problem.m)
    step = config.V / (2.0 * config.alpha)
    no_tolerance = np.full(problem.m, np.inf)

    total = np.zeros_like(x)
    B = []
    trace = []
    for t in range(1, config.N + 1):
        in_B = t >= config.s
        if in_B:
            B.append(t)
            total += x
        x_next, queues, G_sample = dpp_step(problem, x, queues, config.V, config.alpha, streams)
        if (t - 1) % config.trace_stride == 0 or t == config.N:
            trace.append(
                TraceRecord(
                    t=t,
                    x=x,
                    G_hat=G_sample,
                    eta=no_tolerance,
                    direction=OBJECTIVE,
                    in_B=in_B,
                    gamma=step,
                    gap=problem.gap(x),
                    violations=problem.violations(x),
                )
            )
        x = x_next

    x_hat = np.clip(total / len(B), problem.domain.lower, problem.domain.upper)
    return SolveResult(
        x_hat, Status.ITERATION_CAP_REACHED, B, trace, time.perf_counter() - start, config.N
    )
