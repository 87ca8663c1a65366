"""Gaussian linear test problems with known optima.

``F(x, xi_0) = x^T xi_0`` and ``G_j(x, xi_j) = x^T xi_j - c_j`` with
``xi_j ~ N(mu_j, diag(var_j))`` over the unit box. The allocation problem
is a maximisation; here everything is stated as minimisation, so a revenue
of 80 shows up as ``f* = -80``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from .core import Box, Oracle, SamplePool, StochasticProblem

_DRAW_CHUNK = 8192


class GaussianLinearOracle(Oracle):
    """``x^T xi - offset`` with ``xi ~ N(mean, diag(var))``."""

    def __init__(self, mean, var, offset: float = 0.0):
        self.mean = np.asarray(mean, dtype=float)
        self.var = np.asarray(var, dtype=float)
        self.std = np.sqrt(self.var)
        self.offset = float(offset)

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return self.mean + self.std * rng.standard_normal((n, self.mean.shape[0]))

    def __call__(self, x, rng):
        xi = self.mean + self.std * rng.standard_normal(self.mean.shape[0])
        return float(x @ xi) - self.offset, xi

    def sample_many(self, x, rng, n):
        xi = self.draw(rng, n)
        return xi @ x - self.offset, xi

    def pool(self):
        return LinearPool(self)

    def truth(self, x) -> float:
        return float(x @ self.mean) - self.offset

    def second_moment(self) -> float:
        """Exact ``E |xi|_2^2 = |mean|^2 + tr(cov)``."""
        return float(self.mean @ self.mean + self.var.sum())


class LinearPool(SamplePool):
    # the sample mean of xi is sufficient for an average of linear functions
    def __init__(self, oracle: GaussianLinearOracle):
        self.oracle = oracle
        self.total = np.zeros_like(oracle.mean)
        self.count = 0
        self._xi_bar = self.total

    def add(self, rng, n=1):
        done = 0
        while done < n:
            k = min(_DRAW_CHUNK, n - done)
            self.total = self.total + self.oracle.draw(rng, k).sum(axis=0)
            done += k
        self.count += n
        self._xi_bar = self.total / self.count

    @property
    def size(self):
        return self.count

    def mean(self, x):
        if not self.count:
            raise ValueError("empty sample pool")
        return float(x @ self._xi_bar) - self.oracle.offset


@dataclass(eq=False)
class GaussianLinearSpec:
    """Means and diagonal variances for the objective and ``m`` constraints."""

    mu0: np.ndarray
    var0: np.ndarray
    mus: np.ndarray
    variances: np.ndarray
    c: np.ndarray
    name: str = "gaussian-linear"

    def __post_init__(self):
        self.mu0 = np.atleast_1d(np.asarray(self.mu0, dtype=float))
        d = self.mu0.shape[0]
        self.var0 = np.broadcast_to(np.asarray(self.var0, dtype=float), (d,)).copy()
        self.mus = np.asarray(self.mus, dtype=float).reshape(-1, d)
        m = self.mus.shape[0]
        self.variances = np.broadcast_to(np.asarray(self.variances, dtype=float), (m, d)).copy()
        self.c = np.broadcast_to(np.asarray(self.c, dtype=float), (m,)).copy()
        if np.any(self.var0 < 0) or np.any(self.variances < 0):
            raise ValueError("covariances must be positive semidefinite (diagonal >= 0)")
        finite = [self.mu0, self.var0, self.mus, self.variances, self.c]
        if not all(np.all(np.isfinite(a)) for a in finite):
            raise ValueError("spec entries must be finite")

    @classmethod
    def isotropic(cls, d, m, mu0, var0, mu, var, c=0.0, name="gaussian-linear"):
        """All constraint means ``mu * 1_d`` and covariances ``var * I``."""
        return cls(
            np.full(d, float(mu0)), np.full(d, float(var0)),
            np.full((m, d), float(mu)), np.full((m, d), float(var)), np.full(m, float(c)),
            name=name,
        )

    @property
    def d(self) -> int:
        return self.mu0.shape[0]

    @property
    def m(self) -> int:
        return self.mus.shape[0]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "d": self.d,
            "m": self.m,
            "mu0": self.mu0.tolist(),
            "var0": self.var0.tolist(),
            "mus": self.mus.tolist(),
            "variances": self.variances.tolist(),
            "c": self.c.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GaussianLinearSpec":
        """Build from a config mapping; scalars are broadcast to ``d`` / ``m``."""
        data = dict(data)
        d = int(data["d"])
        m = int(data.get("m", 0))
        mu0 = np.broadcast_to(np.asarray(data["mu0"], dtype=float), (d,))
        var0 = data.get("var0", 1.0)
        mus = np.broadcast_to(np.asarray(data.get("mus", 0.0), dtype=float), (m, d))
        variances = data.get("variances", 1.0)
        if m:
            variances = np.broadcast_to(np.asarray(variances, dtype=float), (m, d))
        else:
            variances = np.zeros((0, d))
        return cls(mu0, var0, mus, variances, data.get("c", 0.0), name=data.get("name", "inline"))


@dataclass
class Optimum:
    status: str  # "optimal", "infeasible" or "unavailable"
    x: Optional[np.ndarray] = None
    f: Optional[float] = None


def analytic_optimum(spec: GaussianLinearSpec) -> Optimum:
    """Solve ``min x^T mu0  s.t. x^T mu_j <= c_j, x in [0,1]^d``.

    When the box minimiser already satisfies every constraint it is returned
    directly (and ``f*`` is an exactly rounded sum); otherwise the LP is
    handed to HiGHS.
    """
    x_box = (spec.mu0 < 0).astype(float)
    if spec.m == 0 or np.all(spec.mus @ x_box <= spec.c):
        return Optimum("optimal", x_box, math.fsum(spec.mu0[spec.mu0 < 0]))
    res = linprog(
        spec.mu0, A_ub=spec.mus, b_ub=spec.c, bounds=[(0.0, 1.0)] * spec.d, method="highs"
    )
    if res.status == 2:
        return Optimum("infeasible")
    if res.status != 0:
        return Optimum("unavailable")
    x = np.clip(res.x, 0.0, 1.0)
    return Optimum("optimal", x, float(x @ spec.mu0))


def make_problem(spec: GaussianLinearSpec) -> StochasticProblem:
    """Stochastic problem over the unit box with analytic references attached."""
    objective = GaussianLinearOracle(spec.mu0, spec.var0)
    constraints = [
        GaussianLinearOracle(mu, var, c) for mu, var, c in zip(spec.mus, spec.variances, spec.c)
    ]
    opt = analytic_optimum(spec)
    mus, c = spec.mus, spec.c
    return StochasticProblem(
        domain=Box.unit(spec.d),
        objective=objective,
        constraints=constraints,
        objective_fn=objective.truth,
        constraints_fn=lambda x: mus @ x - c,
        x_star=opt.x,
        f_star=opt.f,
        second_moments=np.array([o.second_moment() for o in [objective, *constraints]]),
        name=spec.name,
    )


# --------------------------------------------------------------------------
# Presets
# --------------------------------------------------------------------------

PRESET_D = 100
PRESET_M = 5
PRESET_MU0 = -0.8
PRESET_X1 = 0.5
PRESET_M_BOUND = 10.0
PRESET_REPEATS = 100
PRESET_N = 10_000

FEASIBLE_MEANS = {"easy": -0.2, "hard": -0.001}
FEASIBLE_VARIANCES = {"lowvar": 0.01, "midvar": 2.5, "highvar": 5.0}


def preset_spec(name: str) -> GaussianLinearSpec:
    if name == "infeasible":
        return GaussianLinearSpec.isotropic(PRESET_D, PRESET_M, PRESET_MU0, 1.0, 0.2, 1.0, name=name)
    parts = name.split("-")
    if len(parts) != 3 or parts[0] != "feasible":
        raise KeyError(f"unknown preset {name!r}")
    try:
        mu, var = FEASIBLE_MEANS[parts[1]], FEASIBLE_VARIANCES[parts[2]]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}") from None
    return GaussianLinearSpec.isotropic(PRESET_D, PRESET_M, PRESET_MU0, 1.0, mu, var, name=name)


def preset_names() -> list[str]:
    names = [f"feasible-{a}-{b}" for a in FEASIBLE_MEANS for b in FEASIBLE_VARIANCES]
    return names + ["infeasible"]


def presets():
    """The six feasible settings and the infeasible one, as experiment plans."""
    from .harness.plan import ExperimentPlan

    return [
        ExperimentPlan(
            spec=preset_spec(name),
            preset=name,
            algorithms=["mcsa", "mcsa-online", "dpp"],
            n_grid=[PRESET_N],
            repeats=PRESET_REPEATS,
            x1=PRESET_X1,
            M=PRESET_M_BOUND,
        )
        for name in preset_names()
    ]


def preset(name: str):
    for plan in presets():
        if plan.preset == name:
            return plan
    raise KeyError(f"unknown preset {name!r}")
