"""Command line interface: ``mcsa {solve,experiment,presets,diagnose,rate}``.

Exit codes: 0 success, 1 usage or configuration error, 2 I/O error,
3 when ``solve`` ends with an empty averaging set.
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from ..core import ConfigurationError
from ..synthetic import make_problem, preset, preset_names
from .diagnostics import diagnose
from .experiment import run_algorithm, run_experiment, solver_config
from .plan import ALGORITHMS, ExperimentPlan, load_plan
from .rates import fit_summary_csv

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_EMPTY_B = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _int_list(text):
    return [int(v) for v in text.split(",") if v]


def _str_list(text):
    return [v for v in text.split(",") if v]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mcsa", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def problem_flags(p):
        src = p.add_mutually_exclusive_group()
        src.add_argument("--preset", help="named preset, see `mcsa presets`")
        src.add_argument("--config", help="YAML plan file")
        p.add_argument("--seed", type=int)

    p = sub.add_parser("solve", help="solve one problem with one algorithm")
    problem_flags(p)
    p.add_argument("--algo", choices=ALGORITHMS, default="mcsa")
    p.add_argument("--N", type=int)
    p.add_argument("--L", type=int)

    p = sub.add_parser("experiment", help="run an experiment plan")
    problem_flags(p)
    p.add_argument("--algo", type=_str_list, help="comma separated subset of " + ",".join(ALGORITHMS))
    p.add_argument("--N", type=_int_list, help="comma separated horizons")
    p.add_argument("--L", type=int)
    p.add_argument("--repeats", type=int)
    p.add_argument("--out")
    p.add_argument("--plot", action="store_true", default=None)
    p.add_argument("--workers", type=int)

    sub.add_parser("presets", help="list the named presets")

    p = sub.add_parser("diagnose", help="assumption and guarantee diagnostics")
    problem_flags(p)
    p.add_argument("--algo", choices=("mcsa", "mcsa-online"), default="mcsa")
    p.add_argument("--N", type=int)
    p.add_argument("--L", type=int)
    p.add_argument("--repeats", type=int, default=10)

    p = sub.add_parser("rate", help="fit log-log slopes from a summary CSV")
    p.add_argument("summary", help="summary.csv written by `mcsa experiment`")
    return parser


def _plan(args, **overrides) -> ExperimentPlan:
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if args.config:
        return load_plan(args.config, **overrides)
    if args.preset:
        try:
            data = preset(args.preset).to_dict()
        except KeyError as exc:
            raise ConfigurationError(str(exc.args[0])) from None
    else:
        data = {"preset": "feasible-easy-lowvar"}
    data.update(overrides)
    return ExperimentPlan.from_dict(data)


def _horizon(plan: ExperimentPlan, N):
    return N if N is not None else plan.n_grid[-1]


def cmd_solve(args) -> int:
    plan = _plan(args, seed=args.seed, L=args.L)
    N = _horizon(plan, args.N)
    problem = make_problem(plan.spec)
    result = run_algorithm(plan, args.algo, N, plan.seed, problem)
    print(f"status: {result.status.value}")
    print(f"|B|/N: {result.b_fraction:.6g}")
    gap = problem.gap(result.x_hat)
    if gap is not None:
        print(f"gap f(x_hat) - f*: {gap:.6g}")
    viol = problem.violations(result.x_hat)
    if viol is not None and viol.size:
        print(f"max violation: {max(float(viol.max()), 0.0):.6g}")
    print("x_hat:", np.array2string(result.x_hat, precision=6, threshold=20))
    return EXIT_EMPTY_B if not result.B else EXIT_OK


def cmd_experiment(args) -> int:
    plan = _plan(
        args, algorithms=args.algo, n_grid=args.N, L=args.L, repeats=args.repeats,
        seed=args.seed, out_dir=args.out, plot=args.plot, workers=args.workers,
    )
    summary = run_experiment(plan)
    print(f"{'algorithm':<12} {'N':>7} {'gap':>12} {'violation':>12} {'|B|/N':>8}")
    for r in summary.rows:
        print(f"{r.algorithm:<12} {r.N:>7} {r.gap_mean:>12.5g} {r.violation_mean:>12.5g} {r.b_fraction_mean:>8.4f}")
    print(f"artifacts in {summary.out_dir}")
    return EXIT_OK


def cmd_presets(args) -> int:
    for name in preset_names():
        plan = preset(name)
        spec = plan.spec
        print(
            f"{name:<24} d={spec.d} m={spec.m} mu={spec.mus[0, 0]:g} sigma2={spec.variances[0, 0]:g} "
            f"N={plan.n_grid[-1]} repeats={plan.repeats}"
        )
    return EXIT_OK


def cmd_diagnose(args) -> int:
    plan = _plan(args, seed=args.seed, L=args.L)
    problem = make_problem(plan.spec)
    config = solver_config(plan, args.algo, _horizon(plan, args.N), plan.seed, problem)
    for line in diagnose(problem, config, repeats=args.repeats).lines():
        print(line)
    return EXIT_OK


def cmd_rate(args) -> int:
    for algorithm, fits in fit_summary_csv(args.summary).items():
        for kind, fit in fits.items():
            text = f"slope {fit.slope:.4f} intercept {fit.intercept:.4f}" if fit else "skipped"
            print(f"{algorithm:<12} {kind:<10} {text}")
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "experiment": cmd_experiment,
    "presets": cmd_presets,
    "diagnose": cmd_diagnose,
    "rate": cmd_rate,
}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigurationError, KeyError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
