"""Mirror maps, Bregman divergences and closed-form prox-projections.

Two pairings are supported:

* ``ScaledEuclidean(alpha)`` with a :class:`~mcsa.core.Box`,
  ``psi(x) = alpha * <x, x>``;
* ``NegativeEntropy`` with a :class:`~mcsa.core.ProductOfSimplexes`,
  ``psi(x) = sum_i x_i log x_i``.

Any other pairing raises :class:`~mcsa.core.ConfigurationError`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import rel_entr

from .core import Box, ConfigurationError, Domain, ProductOfSimplexes

ENTROPY_FLOOR = 1e-300


@dataclass(frozen=True)
class ScaledEuclidean:
    alpha: float = 1.0

    def __post_init__(self):
        # 1-strong convexity w.r.t. the l2 norm needs 2*alpha >= 1
        if not self.alpha >= 0.5:
            raise ConfigurationError(f"ScaledEuclidean needs alpha >= 1/2, got {self.alpha}")

    def psi(self, x):
        return self.alpha * float(np.dot(x, x))

    def grad(self, x):
        return 2.0 * self.alpha * x

    def bregman(self, x, y):
        diff = x - y
        return self.alpha * float(np.dot(diff, diff))

    def project(self, domain, x, v):
        _require(self, domain, Box)
        return np.clip(x - v / (2.0 * self.alpha), domain.lower, domain.upper)

    def diameter_sq(self, domain):
        _require(self, domain, Box)
        return self.alpha * float(np.sum((domain.upper - domain.lower) ** 2))

    def dual_norm(self, domain, y):
        return float(np.linalg.norm(y))

    def ref_norm(self, domain, y):
        return float(np.linalg.norm(y))


@dataclass(frozen=True)
class NegativeEntropy:
    def psi(self, x):
        return float(np.sum(rel_entr(x, 1.0)))

    def grad(self, x):
        if np.any(x <= 0):
            raise ValueError("negative entropy gradient needs strictly positive x")
        return np.log(x) + 1.0

    def bregman(self, x, y):
        if np.any(y <= 0):
            raise ValueError("negative entropy Bregman divergence needs y > 0")
        if np.any(x < 0):
            raise ValueError("negative entropy Bregman divergence needs x >= 0")
        return float(np.sum(rel_entr(x, y) - x + y))

    def project(self, domain, x, v):
        _require(self, domain, ProductOfSimplexes)
        logits = np.log(np.maximum(x, ENTROPY_FLOOR)) - v
        z = np.empty_like(logits)
        for g in domain.groups():
            w = np.exp(logits[g] - logits[g].max())
            w = np.maximum(w, ENTROPY_FLOOR)
            z[g] = w / w.sum()
        return z

    def diameter_sq(self, domain):
        # sup over the closed simplex is infinite; log(size) is the value at
        # the uniform centre, which is the usual finite surrogate
        _require(self, domain, ProductOfSimplexes)
        return float(sum(np.log(s) for s in domain.sizes))

    # Per block the map is 1-strongly convex w.r.t. l1, so on a product the
    # reference norm is sqrt(sum_g |x_g|_1^2) and its dual sqrt(sum_g |y_g|_inf^2).
    def dual_norm(self, domain, y):
        return float(np.sqrt(sum(np.max(np.abs(y[g])) ** 2 for g in domain.groups())))

    def ref_norm(self, domain, y):
        return float(np.sqrt(sum(np.sum(np.abs(y[g])) ** 2 for g in domain.groups())))


MirrorMap = ScaledEuclidean | NegativeEntropy


def _require(mirror, domain, kind):
    if not isinstance(domain, kind):
        raise ConfigurationError(
            f"{type(mirror).__name__} cannot project onto {type(domain).__name__}"
        )


def default_mirror(domain: Domain) -> MirrorMap:
    """The natural map for a domain: xᵀx on boxes, entropy on simplexes."""
    if isinstance(domain, Box):
        return ScaledEuclidean(1.0)
    if isinstance(domain, ProductOfSimplexes):
        return NegativeEntropy()
    raise ConfigurationError(f"no mirror map for {domain!r}")


def bregman(mirror: MirrorMap, x, y) -> float:
    """``psi(x) - psi(y) - <grad psi(y), x - y>``."""
    return mirror.bregman(np.asarray(x, dtype=float), np.asarray(y, dtype=float))


def prox_project(mirror: MirrorMap, domain: Domain, x, v) -> np.ndarray:
    """``argmin_{z in domain} <v, z> + B_psi(z, x)``."""
    return mirror.project(domain, np.asarray(x, dtype=float), np.asarray(v, dtype=float))


def diameter_sq(mirror: MirrorMap, domain: Domain) -> float:
    """Squared diameter ``max B_psi(z, x)`` used by the step-size schedules."""
    return mirror.diameter_sq(domain)


def lemma1_check(mirror: MirrorMap, domain: Domain, n: int, rng, tol: float = 1e-9):
    """Sample the three-point inequality for the prox step.

    For random ``x, z`` in the domain and ``y`` uniform in ``[-1, 1]^d``
    checks ``B(z, P_x(y)) <= B(z, x) + <y, z - x> + |y|_*^2 / 2 + tol``.
    Returns the number of failing triples.
    """
    xs = domain.sample(rng, n)
    zs = domain.sample(rng, n)
    ys = rng.uniform(-1.0, 1.0, size=(n, domain.dimension))
    failures = 0
    for x, z, y in zip(xs, zs, ys):
        lhs = mirror.bregman(z, mirror.project(domain, x, y))
        rhs = mirror.bregman(z, x) + float(y @ (z - x)) + 0.5 * mirror.dual_norm(domain, y) ** 2
        if lhs > rhs + tol:
            failures += 1
    return failures
