"""Domain types, stochastic oracles and random streams shared by every solver."""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

SIMPLEX_SUM_TOL = 1e-12


class ConfigurationError(ValueError):
    """Raised for invalid solver, schedule or map/domain configurations."""


def as_point(x, dimension: Optional[int] = None) -> np.ndarray:
    """Return ``x`` as a finite float vector, optionally checking its length."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError(f"point must be a 1-d vector, got shape {x.shape}")
    if dimension is not None and x.shape[0] != dimension:
        raise ValueError(f"point has length {x.shape[0]}, expected {dimension}")
    if not np.all(np.isfinite(x)):
        raise ValueError("point has non-finite entries")
    return x


# --------------------------------------------------------------------------
# Domains
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Box:
    """Axis-aligned box ``lower <= x <= upper``."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lower.shape != upper.shape or lower.ndim != 1:
            raise ValueError("lower and upper must be vectors of equal length")
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise ValueError("box bounds must be finite")
        if np.any(lower > upper):
            raise ValueError("box requires lower <= upper coordinatewise")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def unit(cls, d: int) -> "Box":
        return cls(np.zeros(d), np.ones(d))

    @property
    def dimension(self) -> int:
        return self.lower.shape[0]

    def contains(self, x: np.ndarray) -> bool:
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Draw ``n`` points uniformly from the box, shape ``(n, d)``."""
        u = rng.random((n, self.dimension))
        return self.lower + u * (self.upper - self.lower)

    def center(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)

    def __repr__(self):
        return f"Box(d={self.dimension})"


@dataclass(frozen=True, eq=False)
class ProductOfSimplexes:
    """Cartesian product of probability simplexes with the given group sizes."""

    sizes: tuple

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        if not sizes or any(s <= 0 for s in sizes):
            raise ValueError("simplex group sizes must be positive")
        object.__setattr__(self, "sizes", sizes)

    @property
    def dimension(self) -> int:
        return sum(self.sizes)

    @property
    def offsets(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(self.sizes)])

    def groups(self):
        """Yield one slice per simplex block."""
        offs = self.offsets
        for a, b in zip(offs[:-1], offs[1:]):
            yield slice(int(a), int(b))

    def contains(self, x: np.ndarray) -> bool:
        if np.any(x < 0):
            return False
        return all(abs(x[g].sum() - 1.0) <= SIMPLEX_SUM_TOL for g in self.groups())

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Uniform (flat Dirichlet) draws on each block, shape ``(n, d)``."""
        out = np.empty((n, self.dimension))
        for g, size in zip(self.groups(), self.sizes):
            out[:, g] = rng.dirichlet(np.ones(size), size=n)
        return out

    def center(self) -> np.ndarray:
        return np.concatenate([np.full(s, 1.0 / s) for s in self.sizes])

    def __repr__(self):
        return f"ProductOfSimplexes(sizes={self.sizes})"


Domain = Box | ProductOfSimplexes


def membership(domain: Domain, x) -> bool:
    """True iff ``x`` lies in ``domain``.

    Box bounds are checked exactly, simplex sums to within 1e-12.
    Raises ValueError when the length of ``x`` differs from the domain dimension.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (domain.dimension,):
        raise ValueError(
            f"dimension mismatch: point {x.shape}, domain d={domain.dimension}"
        )
    return domain.contains(x)


# --------------------------------------------------------------------------
# Random streams
# --------------------------------------------------------------------------


def stream(seed: int, name: str) -> np.random.Generator:
    """Independent generator for the named component of a seeded run.

    Streams are keyed by name, so adding a constraint (and therefore new
    stream names) leaves every existing stream untouched.
    """
    key = zlib.crc32(name.encode("utf-8"))
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(key,)))


@dataclass
class Streams:
    """The named sub-streams used by one solver run."""

    seed: int
    m: int
    objective: np.random.Generator = field(init=False)
    constraint: list = field(init=False)
    estimator: list = field(init=False)
    tie_break: np.random.Generator = field(init=False)

    def __post_init__(self):
        self.objective = stream(self.seed, "objective-step")
        self.constraint = [stream(self.seed, f"constraint-step-{j}") for j in range(self.m)]
        self.estimator = [stream(self.seed, f"estimator-{j}") for j in range(self.m)]
        self.tie_break = stream(self.seed, "tie-break")

    def named(self, name: str) -> np.random.Generator:
        return stream(self.seed, name)


# --------------------------------------------------------------------------
# Oracles
# --------------------------------------------------------------------------


class Oracle:
    """Stochastic first-order oracle for ``F(x, xi)``.

    ``fn(x, rng)`` must draw exactly one sample ``xi`` from ``rng`` and return
    ``(F(x, xi), F'(x, xi))``. All randomness has to come from ``rng`` so runs
    replay exactly under a fixed seed.
    """

    def __init__(self, fn: Callable[[np.ndarray, np.random.Generator], tuple]):
        self.fn = fn

    def __call__(self, x: np.ndarray, rng: np.random.Generator):
        value, grad = self.fn(x, rng)
        return float(value), np.asarray(grad, dtype=float)

    def sample_many(self, x: np.ndarray, rng: np.random.Generator, n: int):
        """``n`` independent (value, subgradient) samples at ``x``."""
        values = np.empty(n)
        grads = np.empty((n, x.shape[0]))
        for i in range(n):
            values[i], grads[i] = self(x, rng)
        return values, grads

    def pool(self) -> "SamplePool":
        """Empty pool of frozen samples used by the constraint estimator."""
        return ReplayPool(self)


class SamplePool:
    """A growing set of frozen draws ``xi_1..xi_n`` of one oracle.

    ``mean(x)`` returns ``(1/n) * sum_l F(x, xi_l)`` for the frozen draws.
    """

    def add(self, rng: np.random.Generator, n: int = 1) -> None:
        raise NotImplementedError

    @property
    def size(self) -> int:
        raise NotImplementedError

    def mean(self, x: np.ndarray) -> float:
        raise NotImplementedError


class ReplayPool(SamplePool):
    # Generic oracles only expose fn(x, rng), so a frozen draw is stored as the
    # seed of a private generator and replayed on every evaluation.
    def __init__(self, oracle: Oracle):
        self.oracle = oracle
        self.seeds: list[int] = []

    def add(self, rng, n=1):
        self.seeds.extend(int(s) for s in rng.integers(0, 2**63 - 1, size=n))

    @property
    def size(self):
        return len(self.seeds)

    def mean(self, x):
        if not self.seeds:
            raise ValueError("empty sample pool")
        total = 0.0
        for s in self.seeds:
            total += self.oracle(x, np.random.default_rng(s))[0]
        return total / len(self.seeds)


# --------------------------------------------------------------------------
# Problems and traces
# --------------------------------------------------------------------------


@dataclass(eq=False)
class StochasticProblem:
    """min E F(x, xi_0) s.t. E G_j(x, xi_j) <= 0, x in domain.

    Optional analytic references (``objective_fn``, ``constraints_fn``,
    ``x_star``, ``f_star``, ``second_moments``) are only used for reporting and
    diagnostics, never by the solvers themselves.
    """

    domain: Domain
    objective: Oracle
    constraints: Sequence[Oracle] = ()
    objective_fn: Optional[Callable[[np.ndarray], float]] = None
    constraints_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None
    x_star: Optional[np.ndarray] = None
    f_star: Optional[float] = None
    second_moments: Optional[np.ndarray] = None
    name: str = "problem"

    def __post_init__(self):
        self.constraints = list(self.constraints)

    @property
    def dimension(self) -> int:
        return self.domain.dimension

    @property
    def m(self) -> int:
        return len(self.constraints)

    @property
    def has_truth(self) -> bool:
        return self.objective_fn is not None and self.f_star is not None

    def gap(self, x: np.ndarray) -> Optional[float]:
        if not self.has_truth:
            return None
        return float(self.objective_fn(x) - self.f_star)

    def violations(self, x: np.ndarray) -> Optional[np.ndarray]:
        """True constraint values g_j(x), or None without analytic truth."""
        if self.constraints_fn is None:
            return None
        return np.asarray(self.constraints_fn(x), dtype=float).reshape(self.m)


OBJECTIVE = 0


@dataclass(frozen=True, eq=False)
class TraceRecord:
    """State of one iteration.

    ``direction`` is 0 for an objective step and ``j`` (1-based) when the step
    followed the subgradient of constraint ``j``.
    """

    t: int
    x: np.ndarray
    G_hat: np.ndarray
    eta: np.ndarray
    direction: int
    in_B: bool
    gamma: float
    gap: Optional[float] = None
    violations: Optional[np.ndarray] = None

    @property
    def direction_label(self) -> str:
        return "objective" if self.direction == OBJECTIVE else f"constraint:{self.direction}"


def selection_rule(t: int, s: int, G_hat: np.ndarray, eta: np.ndarray) -> bool:
    """Membership of iteration ``t`` in the averaging set B."""
    return t >= s and bool(np.all(G_hat <= eta))
