import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mcsa.core import stream
from mcsa.synthetic import (
    GaussianLinearOracle,
    GaussianLinearSpec,
    analytic_optimum,
    make_problem,
    preset,
    preset_names,
    preset_spec,
    presets,
)


def vertex_enumeration(spec):
    """Brute-force LP oracle: best feasible vertex of {mus x <= c, 0 <= x <= 1}."""
    d = spec.d
    A = np.vstack([spec.mus, np.eye(d), -np.eye(d)])
    b = np.concatenate([spec.c, np.ones(d), np.zeros(d)])
    best = None
    for rows in itertools.combinations(range(A.shape[0]), d):
        sub = A[list(rows)]
        if abs(np.linalg.det(sub)) < 1e-12:
            continue
        x = np.linalg.solve(sub, b[list(rows)])
        if np.all(A @ x <= b + 1e-9):
            f = float(spec.mu0 @ x)
            if best is None or f < best:
                best = f
    return best


def test_coordinatewise_optimum_d2():
    spec = GaussianLinearSpec([-1.0, 2.0], 1.0, [[1.0, 1.0]], 1.0, [5.0])
    opt = analytic_optimum(spec)
    np.testing.assert_array_equal(opt.x, [1.0, 0.0])
    assert opt.f == -1.0


def test_preset_optimum_is_exactly_minus_80():
    for name in ("feasible-easy-lowvar", "feasible-hard-highvar"):
        problem = make_problem(preset_spec(name))
        assert problem.f_star == -80.0
        np.testing.assert_array_equal(problem.x_star, np.ones(100))


def test_binding_lp_d2():
    # min -x1 - x2  s.t. x1 + x2 <= 1: optimum -1 along an edge
    spec = GaussianLinearSpec([-1.0, -1.0], 1.0, [[1.0, 1.0]], 1.0, [1.0])
    opt = analytic_optimum(spec)
    assert opt.status == "optimal"
    assert opt.f == pytest.approx(-1.0, abs=1e-9)
    assert opt.f == pytest.approx(vertex_enumeration(spec), abs=1e-9)


def test_infeasible_preset_optimum_is_origin():
    problem = make_problem(preset_spec("infeasible"))
    np.testing.assert_allclose(problem.x_star, np.zeros(100), atol=1e-12)
    assert problem.f_star == pytest.approx(0.0, abs=1e-12)


def test_one_dimensional_lp():
    # min -x s.t. x <= 0.5
    spec = GaussianLinearSpec([-1.0], 1.0, [[1.0]], 1.0, [0.5])
    opt = analytic_optimum(spec)
    assert opt.x[0] == pytest.approx(0.5) and opt.f == pytest.approx(-0.5)


def test_truly_infeasible_lp():
    spec = GaussianLinearSpec([-1.0, -1.0], 1.0, [[1.0, 1.0]], 1.0, [-1.0])
    assert analytic_optimum(spec).status == "infeasible"


@settings(max_examples=60, deadline=None)
@given(
    d=st.integers(1, 3),
    m=st.integers(1, 3),
    data=st.data(),
)
def test_optimum_matches_vertex_enumeration(d, m, data):
    coef = st.floats(-2, 2, allow_nan=False).map(lambda v: round(v, 3))
    mu0 = data.draw(st.lists(coef, min_size=d, max_size=d))
    mus = data.draw(st.lists(st.lists(coef, min_size=d, max_size=d), min_size=m, max_size=m))
    c = data.draw(st.lists(st.floats(0, 2).map(lambda v: round(v, 3)), min_size=m, max_size=m))
    spec = GaussianLinearSpec(mu0, 1.0, mus, 1.0, c)
    opt = analytic_optimum(spec)
    # c >= 0 keeps the origin feasible
    assert opt.status == "optimal"
    assert opt.f == pytest.approx(vertex_enumeration(spec), abs=1e-7)


def test_seven_presets():
    names = preset_names()
    assert len(names) == 7 == len(presets())
    assert "infeasible" in names
    for plan in presets():
        assert plan.spec.d == 100 and plan.spec.m == 5
        assert plan.n_grid == [10_000] and plan.repeats == 100
        assert plan.x1 == 0.5 and plan.M == 10.0
        assert plan.algorithms == ["mcsa", "mcsa-online", "dpp"]


def test_easy_lowvar_parameters():
    spec = preset("feasible-easy-lowvar").spec
    np.testing.assert_array_equal(spec.mu0, np.full(100, -0.8))
    np.testing.assert_array_equal(spec.mus, np.full((5, 100), -0.2))
    np.testing.assert_array_equal(spec.variances, np.full((5, 100), 0.01))
    np.testing.assert_array_equal(spec.c, np.zeros(5))


def test_infeasible_preset_parameters():
    plan = preset("infeasible")
    assert plan.n_grid == [10_000]
    np.testing.assert_array_equal(plan.spec.mus, np.full((5, 100), 0.2))
    np.testing.assert_array_equal(plan.spec.variances, np.ones((5, 100)))


def test_unknown_preset():
    for name in ("feasible-easy", "feasible-medium-lowvar", "nope"):
        with pytest.raises(KeyError):
            preset_spec(name)


def test_oracle_mean_within_four_standard_errors():
    oracle = GaussianLinearOracle(np.full(5, -0.2), np.full(5, 2.5), offset=0.3)
    x = np.array([1.0, 0.5, 0.0, 0.25, 1.0])
    n = 100_000
    values, _ = oracle.sample_many(x, stream(1, "test"), n)
    se = math.sqrt(2.5 * float(x @ x) / n)
    assert abs(values.mean() - oracle.truth(x)) <= 4 * se
    assert values.std(ddof=1) ** 2 == pytest.approx(2.5 * float(x @ x), rel=0.02)


def test_pool_matches_pointwise_average():
    oracle = GaussianLinearOracle(np.array([0.1, -0.3]), np.array([1.0, 4.0]), offset=0.5)
    pool = oracle.pool()
    pool.add(stream(3, "a"), 20_000)
    xi = oracle.draw(stream(3, "a"), 20_000)
    x = np.array([0.4, 0.9])
    assert pool.mean(x) == pytest.approx(float(np.mean(xi @ x)) - 0.5, rel=1e-12)
    assert pool.size == 20_000


def test_second_moment_empirical():
    problem = make_problem(GaussianLinearSpec.isotropic(4, 1, -0.5, 1.0, -0.5, 1.0))
    # |mu|^2 + d sigma^2 = 1 + 4
    assert problem.second_moments[1] == pytest.approx(5.0)
    _, grads = problem.constraints[0].sample_many(np.zeros(4), stream(0, "m2"), 50_000)
    assert np.mean(np.sum(grads**2, axis=1)) == pytest.approx(5.0, rel=0.05)


def test_invalid_covariance_rejected():
    with pytest.raises(ValueError):
        GaussianLinearSpec.isotropic(3, 1, -1.0, 1.0, 0.0, -0.5)
    with pytest.raises(ValueError):
        GaussianLinearSpec([0.0, math.nan], 1.0, [[0.0, 0.0]], 1.0, [0.0])


def test_spec_dict_round_trip_and_broadcast():
    spec = preset_spec("feasible-hard-midvar")
    again = GaussianLinearSpec.from_dict(spec.to_dict())
    for a in ("mu0", "var0", "mus", "variances", "c"):
        np.testing.assert_array_equal(getattr(spec, a), getattr(again, a))
    small = GaussianLinearSpec.from_dict({"d": 3, "m": 2, "mu0": -1.0, "mus": 0.5, "variances": 2.0, "c": 1.0})
    assert small.mus.shape == (2, 3) and np.all(small.variances == 2.0)
