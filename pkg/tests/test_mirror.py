import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mcsa.core import Box, ConfigurationError, ProductOfSimplexes, membership
from mcsa.mirror import (
    NegativeEntropy,
    ScaledEuclidean,
    bregman,
    diameter_sq,
    lemma1_check,
    prox_project,
)

EUC = ScaledEuclidean(1.0)
ENT = NegativeEntropy()


def kl_by_summation(x, y):
    total = 0.0
    for a, b in zip(x, y):
        if a > 0:
            total += a * math.log(a / b)
    return total


def grid_argmin_box(v, x, alpha=1.0, n=1001):
    """Dense grid minimiser of <v,z> + alpha |z - x|^2 over [0,1]^2."""
    g = np.linspace(0.0, 1.0, n)
    Z1, Z2 = np.meshgrid(g, g, indexing="ij")
    obj = v[0] * Z1 + v[1] * Z2 + alpha * ((Z1 - x[0]) ** 2 + (Z2 - x[1]) ** 2)
    i, j = np.unravel_index(np.argmin(obj), obj.shape)
    return np.array([g[i], g[j]])


def grid_argmin_simplex2(v, x, n=1001):
    """Grid minimiser of <v,z> + KL(z||x) over the 2-simplex."""
    z1 = np.linspace(0.0, 1.0, n)
    z2 = 1.0 - z1
    with np.errstate(divide="ignore", invalid="ignore"):
        kl = np.where(z1 > 0, z1 * np.log(z1 / x[0]), 0.0) + np.where(z2 > 0, z2 * np.log(z2 / x[1]), 0.0)
    obj = v[0] * z1 + v[1] * z2 + kl
    k = np.argmin(obj)
    return np.array([z1[k], z2[k]])


# -- bregman ---------------------------------------------------------------


def test_bregman_examples():
    assert bregman(EUC, [0.3, 0.7], [0.3, 0.7]) == 0.0
    direct = (0 - 1) ** 2 + (0 - 1) ** 2  # psi(x)-psi(y)-<2y, x-y> with psi = x.x
    assert bregman(EUC, [0.0, 0.0], [1.0, 1.0]) == pytest.approx(direct) == pytest.approx(2.0)
    kl = kl_by_summation([0.5, 0.5], [0.25, 0.75])
    assert kl == pytest.approx(0.5 * math.log(2) + 0.5 * math.log(2 / 3))
    assert bregman(ENT, [0.5, 0.5], [0.25, 0.75]) == pytest.approx(kl, rel=1e-12)
    assert bregman(ENT, [0.5, 0.5], [0.25, 0.75]) == pytest.approx(0.14384, abs=1e-5)


def test_bregman_matches_definition():
    rng = np.random.default_rng(1)
    for mirror, dom in ((ScaledEuclidean(0.7), Box.unit(4)), (ENT, ProductOfSimplexes([4]))):
        x, y = dom.sample(rng, 2)
        direct = mirror.psi(x) - mirror.psi(y) - mirror.grad(y) @ (x - y)
        assert bregman(mirror, x, y) == pytest.approx(direct, abs=1e-12)


def test_entropy_bregman_domain_error():
    with pytest.raises(ValueError):
        bregman(ENT, [0.5, 0.5], [1.0, 0.0])
    with pytest.raises(ValueError):
        bregman(ENT, [0.5, 0.5], [1.5, -0.5])


# -- prox projection ------------------------------------------------------


def test_prox_zero_direction_is_identity():
    x = np.array([0.2, 0.7, 0.4])
    np.testing.assert_allclose(prox_project(EUC, Box.unit(3), x, np.zeros(3)), x)
    p = np.array([0.2, 0.5, 0.3])
    np.testing.assert_allclose(prox_project(ENT, ProductOfSimplexes([3]), p, np.zeros(3)), p, rtol=1e-14)


def test_prox_examples_against_grid():
    z = prox_project(EUC, Box.unit(2), [0.5, 0.5], [2.0, -2.0])
    np.testing.assert_allclose(z, [0.0, 1.0])
    np.testing.assert_allclose(z, grid_argmin_box(np.array([2.0, -2.0]), np.array([0.5, 0.5])), atol=1e-3)

    z = prox_project(ENT, ProductOfSimplexes([2]), [0.5, 0.5], [math.log(3), 0.0])
    np.testing.assert_allclose(z, [0.25, 0.75], rtol=1e-12)
    np.testing.assert_allclose(
        z, grid_argmin_simplex2(np.array([math.log(3), 0.0]), np.array([0.5, 0.5])), atol=1e-3
    )


def test_incompatible_pairing_rejected():
    with pytest.raises(ConfigurationError):
        prox_project(EUC, ProductOfSimplexes([2]), [0.5, 0.5], [0.0, 0.0])
    with pytest.raises(ConfigurationError):
        prox_project(ENT, Box.unit(2), [0.5, 0.5], [0.0, 0.0])
    with pytest.raises(ConfigurationError):
        diameter_sq(ENT, Box.unit(2))
    with pytest.raises(ConfigurationError):
        ScaledEuclidean(0.25)


def test_entropy_prox_survives_huge_directions():
    dom = ProductOfSimplexes([3, 2])
    z = prox_project(ENT, dom, dom.center(), np.array([1e4, -1e4, 0.0, 800.0, -800.0]))
    assert np.all(np.isfinite(z))
    assert membership(dom, z)
    assert np.all(z > 0)


@settings(max_examples=200, deadline=None)
@given(
    x=st.lists(st.floats(0, 1), min_size=3, max_size=3),
    v=st.lists(st.floats(-50, 50), min_size=3, max_size=3),
    alpha=st.floats(0.5, 5.0),
)
def test_box_prox_output_in_domain(x, v, alpha):
    box = Box([0.0] * 3, [1.0] * 3)
    assert membership(box, prox_project(ScaledEuclidean(alpha), box, np.array(x), np.array(v)))


@settings(max_examples=200, deadline=None)
@given(
    w=st.lists(st.floats(0.01, 1), min_size=4, max_size=4),
    v=st.lists(st.floats(-30, 30), min_size=4, max_size=4),
)
def test_simplex_prox_output_in_domain(w, v):
    dom = ProductOfSimplexes([1, 3])
    w = np.array(w)
    x = np.concatenate([[1.0], w[1:] / w[1:].sum()])
    assert membership(dom, prox_project(ENT, dom, x, np.array(v)))


@pytest.mark.parametrize(
    "mirror,dom", [(ScaledEuclidean(1.3), Box.unit(3)), (ENT, ProductOfSimplexes([2, 3]))]
)
def test_prox_optimality_against_perturbations(mirror, dom):
    rng = np.random.default_rng(5)
    for _ in range(50):
        x = dom.sample(rng, 1)[0]
        v = rng.uniform(-2, 2, dom.dimension)
        z = mirror.project(dom, x, v)
        best = v @ z + mirror.bregman(z, x)
        for zp in dom.sample(rng, 40):
            for lam in (1.0, 0.1, 0.01):
                cand = (1 - lam) * z + lam * zp
                assert v @ cand + mirror.bregman(cand, x) >= best - 1e-9


# -- diameter ----------------------------------------------------------


def test_diameter_examples():
    assert diameter_sq(EUC, Box.unit(100)) == pytest.approx(100.0)
    assert math.sqrt(diameter_sq(EUC, Box.unit(100))) == pytest.approx(10.0)
    assert diameter_sq(EUC, Box.unit(1)) == 1.0
    assert diameter_sq(ENT, ProductOfSimplexes([4])) == pytest.approx(math.log(4))


def test_diameter_against_corner_enumeration():
    import itertools

    box = Box([0.0, -1.0, 2.0], [1.0, 1.0, 2.5])
    corners = [np.array(c) for c in itertools.product(*zip(box.lower, box.upper))]
    best = max(bregman(EUC, z, x) for z in corners for x in corners)
    assert diameter_sq(EUC, box) == pytest.approx(best)


def test_entropy_diameter_from_vertices():
    dom = ProductOfSimplexes([4])
    centre = dom.center()
    vertex_values = [bregman(ENT, e, centre) for e in np.eye(4)]
    assert max(vertex_values) == pytest.approx(diameter_sq(ENT, dom))


# -- sampled inequalities -----------------------------------------------


@pytest.mark.parametrize(
    "mirror,dom",
    [
        (ScaledEuclidean(1.0), Box.unit(5)),
        (ScaledEuclidean(0.5), Box([-1.0] * 3, [2.0] * 3)),
        (ENT, ProductOfSimplexes([5])),
        (ENT, ProductOfSimplexes([2, 3, 4])),
    ],
)
def test_three_point_inequality_sampled(mirror, dom):
    assert lemma1_check(mirror, dom, 2000, np.random.default_rng(0)) == 0


@pytest.mark.parametrize(
    "mirror,dom",
    [(ScaledEuclidean(0.5), Box.unit(4)), (ENT, ProductOfSimplexes([4])), (ENT, ProductOfSimplexes([2, 2, 3]))],
)
def test_strong_convexity_sampled(mirror, dom):
    rng = np.random.default_rng(2)
    xs, ys = dom.sample(rng, 2000), dom.sample(rng, 2000)
    for x, y in zip(xs, ys):
        assert mirror.bregman(y, x) >= 0.5 * mirror.ref_norm(dom, x - y) ** 2 - 1e-9


def test_half_alpha_euclidean_lemma_is_tight():
    # unclamped step for alpha = 1/2 turns the inequality into an equality
    mirror, box = ScaledEuclidean(0.5), Box([-10.0] * 2, [10.0] * 2)
    x, z, y = np.array([0.1, 0.2]), np.array([-0.3, 0.5]), np.array([0.4, -0.2])
    lhs = mirror.bregman(z, mirror.project(box, x, y))
    rhs = mirror.bregman(z, x) + y @ (z - x) + 0.5 * y @ y
    assert lhs == pytest.approx(rhs, abs=1e-14)
