"""Log-log convergence-rate fits over a grid of horizons."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .experiment import read_csv

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float


def rate_fit(ns, values) -> Optional[RateFit]:
    """Least-squares fit of ``log(value) = intercept + slope * log(N)``.

    Needs at least three horizons. If any value is not strictly positive
    (a run already at the optimum, say) the fit is skipped and None returned.
    """
    ns = np.asarray(ns, dtype=float)
    values = np.asarray(values, dtype=float)
    if ns.shape != values.shape or ns.size < 3:
        raise ValueError("rate fit needs at least 3 (N, value) pairs")
    if not np.all(values > 0) or not np.all(np.isfinite(values)):
        log.warning("rate fit skipped: nonpositive or non-finite values %s", values.tolist())
        return None
    slope, intercept = np.polyfit(np.log(ns), np.log(values), 1)
    return RateFit(float(slope), float(intercept))


def fit_summary(rows) -> dict:
    """Slopes of mean gap and mean violation per algorithm.

    ``rows`` are :class:`SummaryRow` objects or dicts read from ``summary.csv``.
    Returns ``{algorithm: {"gap": RateFit | None, "violation": RateFit | None}}``.
    """
    by_algo = {}
    for r in rows:
        get = r.get if isinstance(r, dict) else lambda k, r=r: getattr(r, k)
        by_algo.setdefault(get("algorithm"), []).append(
            (int(get("N")), float(get("gap_mean")), float(get("violation_mean")))
        )
    fits = {}
    for algorithm, points in by_algo.items():
        points.sort()
        ns = [p[0] for p in points]
        fits[algorithm] = {
            "gap": rate_fit(ns, [p[1] for p in points]) if len(points) >= 3 else None,
            "violation": rate_fit(ns, [p[2] for p in points]) if len(points) >= 3 else None,
        }
    return fits


def fit_summary_csv(path) -> dict:
    return fit_summary(read_csv(path))
