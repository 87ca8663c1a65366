"""Decay-curve figures rendered from ``curves.csv`` alone."""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .experiment import read_csv  # noqa: E402


def _as_float(text):
    return float(text) if text not in ("", "nan") else np.nan


def plot_decay(curves_csv, out_dir, fmt: str = "png") -> list[Path]:
    """One figure per horizon N: mean gap per algorithm with dotted 95% bands."""
    curves = defaultdict(lambda: defaultdict(list))
    for row in read_csv(curves_csv):
        key = (int(row["N"]), row["algorithm"])
        c = curves[key]
        c["t"].append(int(row["t"]))
        c["mean"].append(_as_float(row["gap_mean"]))
        c["low"].append(_as_float(row["gap_ci_low"]))
        c["high"].append(_as_float(row["gap_ci_high"]))

    paths = []
    for N in sorted({n for n, _ in curves}):
        fig, ax = plt.subplots(figsize=(6, 4))
        for (n, algorithm), c in sorted(curves.items()):
            if n != N:
                continue
            (line,) = ax.plot(c["t"], c["mean"], label=algorithm)
            ax.plot(c["t"], c["low"], ":", color=line.get_color())
            ax.plot(c["t"], c["high"], ":", color=line.get_color())
        ax.set_xlabel("iteration t")
        ax.set_ylabel("f(x_t) - f(x*)")
        ax.set_title(f"N = {N}")
        ax.legend()
        fig.tight_layout()
        path = Path(out_dir) / f"decay_N{N}.{fmt}"
        # fixed metadata keeps re-rendered files identical
        fig.savefig(path, metadata={"Software": None} if fmt == "png" else {"Date": None})
        plt.close(fig)
        paths.append(path)
    return paths
