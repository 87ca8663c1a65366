"""Experiment plans and their YAML config files."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from typing import Optional

import yaml

from ..core import ConfigurationError
from ..synthetic import GaussianLinearSpec, preset_spec

ALGORITHMS = ("mcsa", "mcsa-online", "dpp")


@dataclass(eq=False)
class ExperimentPlan:
    """Everything needed to reproduce one batch of runs.

    ``L=None`` means ``L = N``; ``D_X=None`` means the diameter of the box
    under the xᵀx map; ``dpp_V=None``/``dpp_alpha=None`` mean ``sqrt(N)``/``N``.
    """

    spec: Optional[GaussianLinearSpec] = None
    preset: Optional[str] = None
    algorithms: list = field(default_factory=lambda: ["mcsa"])
    n_grid: list = field(default_factory=lambda: [10_000])
    repeats: int = 1
    seed: int = 0
    out_dir: str = "runs"
    plot: bool = False
    workers: int = 1
    x1: float = 0.5
    L: Optional[int] = None
    s: int = 1
    schedule: str = "appendix"
    M: float = 10.0
    D_X: Optional[float] = None
    K1: float = 1.0
    K2: float = 1.0
    dpp_V: Optional[float] = None
    dpp_alpha: Optional[float] = None
    write_traces: bool = True
    trace_stride: int = 1
    trace_coords: bool = True

    def __post_init__(self):
        if self.spec is None:
            if self.preset is None:
                raise ConfigurationError("plan needs a preset or an inline spec")
            try:
                self.spec = preset_spec(self.preset)
            except KeyError as exc:
                raise ConfigurationError(str(exc)) from None
        self.algorithms = list(self.algorithms)
        self.n_grid = [int(n) for n in self.n_grid]
        bad = [a for a in self.algorithms if a not in ALGORITHMS]
        if bad or not self.algorithms:
            raise ConfigurationError(f"algorithms must be a nonempty subset of {ALGORITHMS}, got {self.algorithms}")
        if self.repeats < 1:
            raise ConfigurationError("repeats must be >= 1")
        if not self.n_grid or any(n < 1 for n in self.n_grid):
            raise ConfigurationError("N-grid must be a nonempty list of positive horizons")
        if any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ConfigurationError("N-grid must be strictly ascending")
        if self.workers < 1 or self.trace_stride < 1:
            raise ConfigurationError("workers and trace_stride must be >= 1")
        if self.schedule not in ("appendix", "theorem"):
            raise ConfigurationError(f"unknown schedule {self.schedule!r}")

    def to_dict(self) -> dict:
        out = {f.name: getattr(self, f.name) for f in fields(self) if f.name != "spec"}
        out["spec"] = self.spec.to_dict()
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentPlan":
        data = dict(data)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"unknown plan keys: {sorted(unknown)}")
        spec = data.pop("spec", None)
        if spec is not None and not isinstance(spec, GaussianLinearSpec):
            try:
                spec = GaussianLinearSpec.from_dict(spec)
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigurationError(f"invalid spec: {exc}") from None
        return cls(spec=spec, **data)


class _PlanDumper(yaml.SafeDumper):
    pass


def _represent_float(dumper, value):
    if math.isnan(value):
        text = ".nan"
    elif math.isinf(value):
        text = ".inf" if value > 0 else "-.inf"
    else:
        text = format(value, ".17g")
        # PyYAML only resolves floats that carry a dot
        if "." not in text:
            mantissa, _, exponent = text.partition("e")
            text = mantissa + ".0" + ("e" + exponent if exponent else "")
    return dumper.represent_scalar("tag:yaml.org,2002:float", text)


_PlanDumper.add_representer(float, _represent_float)


def dump_plan(plan: ExperimentPlan, path) -> None:
    """Write the plan with every default spelled out (UTF-8, LF, 17 significant digits)."""
    text = yaml.dump(plan.to_dict(), Dumper=_PlanDumper, sort_keys=False, default_flow_style=None)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def load_plan(path, **overrides) -> ExperimentPlan:
    """Read a plan file; ``preset`` entries are expanded from the named preset."""
    with open(path, encoding="utf-8") as fh:
        data = yaml.safe_load(fh) or {}
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path}: expected a mapping at top level")
    data.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentPlan.from_dict(data)

