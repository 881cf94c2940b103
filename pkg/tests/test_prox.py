import math

import numpy as np
import pytest

from sqprox.errors import InvalidParameter, NonFiniteObjective, UnsupportedSpace
from sqprox.objectives import Objective, catalog, catalog_entry, parse_objective
from sqprox.prox import (
    ProxParams,
    composite,
    fixed_point_gap,
    prox,
    prox_inequality_residual,
    prox_oracle,
    prox_search_radius,
)
from sqprox.spaces import Euclidean, TreePoint, load_tree_fixture, parse_space

E1, E2 = Euclidean(1), Euclidean(2)


def test_search_radius_examples():
    f = parse_objective(E2, "quadratic:c=0,0")
    assert abs(prox_search_radius(f, 1.0, [1, 0]) - math.sqrt(2)) < 1e-15
    assert prox_search_radius(f, 1.0, [0, 0]) == 0.0
    r1, r2 = prox_search_radius(f, 1.0, [1, 2]), prox_search_radius(f, 2.0, [1, 2])
    assert abs(r2 / r1 - math.sqrt(2)) < 1e-14
    with pytest.raises(InvalidParameter):
        prox_search_radius(f, 0.0, [1, 2])


def test_params_validation():
    for kw in ({"beta": 0}, {"beta": -1}, {"coarse_points": 2}, {"tol_inner": 0}):
        with pytest.raises(InvalidParameter):
            ProxParams(**kw)


def test_prox_quadratic_line():
    f = parse_objective(E1, "quadratic")
    res = prox(E1, f, ProxParams(), [3.0])
    assert abs(res.point[0] - 1.0) < 1e-12
    assert abs(res.objective - composite(E1, f, 1.0, [3.0], res.point)) <= 1e-12
    assert E1.distance([3.0], res.point) <= res.search_radius


def test_prox_soft_threshold():
    f = parse_objective(E1, "dist")
    res = prox(E1, f, ProxParams(), [3.0])
    assert abs(res.point[0] - 2.0) < 1e-12


@pytest.mark.parametrize("x, beta", [(0.3, 0.5), (-2.0, 1.5), (5.0, 0.1)])
def test_prox_quadratic_closed_form(x, beta):
    # argmin y^2 + (y - x)^2 / (2 beta) = x / (1 + 2 beta)
    f = parse_objective(E1, "quadratic")
    res = prox(E1, f, ProxParams(beta=beta), [x])
    assert abs(res.point[0] - x / (1 + 2 * beta)) < 1e-12 * max(1, abs(x))


def test_prox_tree_moves_toward_center():
    T = load_tree_fixture("path3")
    f = parse_objective(T, "quadratic:c=v1")
    # from vertex c (distance 3 to b) with a=1, beta=0.5 the prox is at distance 3/2 from b
    res = prox(T, f, ProxParams(beta=0.5), T.vertex_point(2))
    assert res.point.edge == 1
    assert abs(res.point.offset - 1.5) < 1e-7


def test_prox_at_minimizer_is_identity():
    for e in catalog():
        x = e.objective.known_minimizer
        res = prox(e.space, e.objective, ProxParams(), x)
        assert e.space.distance(res.point, x) <= 1e-6


def test_oracle_examples():
    f = parse_objective(E1, "quadratic")
    o = prox_oracle(E1, f, 1.0, [3.0], 200)
    assert abs(o.point[0] - 1.0) <= 2 * o.search_radius / 200
    T = load_tree_fixture("path3")
    g = parse_objective(T, "quadratic:c=v1")
    ot = prox_oracle(T, g, 0.5, T.vertex_point(2), 100)
    # lands on the b-c path, i.e. on edge 1
    assert ot.point.edge == 1


def test_oracle_hits_sqrt_cusp():
    # the prox of sqrt(|y|) at x = 1, beta = 1 is the cusp 0 (value 1/2 beats
    # the interior critical point), which no ball grid node lands on
    f = parse_objective(E1, "sqrtnorm:R=5")
    x = [1.0 + 1e-3 * np.pi]
    o = prox_oracle(E1, f, 1.0, x, 40)
    assert o.point[0] == 0.0
    assert abs(o.objective - x[0] ** 2 / 2) <= 1e-15


@pytest.mark.parametrize("name", ["quadratic-e2", "sqrtnorm-e2", "quadratic-h2", "quadratic-spider"])
def test_oracle_refinement_monotone(name):
    e = catalog_entry(name)
    a = prox_oracle(e.space, e.objective, e.c, e.x0, 20)
    b = prox_oracle(e.space, e.objective, e.c, e.x0, 40)
    assert b.objective <= a.objective + 1e-15


def test_oracle_rejects_large_spaces():
    E3 = Euclidean(3)
    with pytest.raises(UnsupportedSpace):
        prox_oracle(E3, parse_objective(E3, "quadratic"), 1.0, [1, 1, 1], 20)
    with pytest.raises(InvalidParameter):
        prox_oracle(E1, parse_objective(E1, "quadratic"), 1.0, [1], 5)


@pytest.mark.parametrize("name", ["quadratic-e2", "dist-e2", "maxcombo-e2", "quadratic-h2", "dist-spider"])
def test_prox_not_worse_than_oracle(name):
    e = catalog_entry(name)
    rng = np.random.default_rng(0)
    for _ in range(10):
        x = e.space.take(e.space.sample(rng, 1), 0)
        beta = float(rng.uniform(0.1, 2.0))
        got = prox(e.space, e.objective, ProxParams(beta=beta), x)
        ref = prox_oracle(e.space, e.objective, beta, x, 50)
        assert got.objective <= ref.objective + 1e-6


def test_prox_inequality_hand_value():
    f = parse_objective(E1, "quadratic")
    r = prox_inequality_residual(E1, f, 1.0, [3.0], [1.0], [0.0], 0.5)
    assert abs(r - 0.875) < 1e-14


def test_prox_inequality_trivial_cases():
    f = parse_objective(E2, "dist:c=1,1")
    x, xb, y = np.array([3.0, 0.0]), np.array([2.5, 0.2]), np.array([-1.0, 2.0])
    assert abs(prox_inequality_residual(E2, f, 1.0, x, xb, y, 0.0) - (max(f(y), f(xb)) - f(xb))) < 1e-14
    assert abs(prox_inequality_residual(E2, f, 1.0, x, xb, xb, 0.7)) < 1e-14
    with pytest.raises(InvalidParameter):
        prox_inequality_residual(E2, f, 1.0, x, xb, y, 2.0)


@pytest.mark.parametrize("entry", catalog(), ids=lambda e: e.name)
def test_prox_inequality_holds_at_certified_points(entry):
    space, f = entry.space, entry.objective
    res = prox(space, f, ProxParams(beta=entry.c), entry.x0)
    rng = np.random.default_rng(1)
    if f.domain_radius is not None:
        Y = space.sample_ball(rng, 1000, f.center, f.domain_radius)
    else:
        Y = space.sample(rng, 1000)
    lam = rng.uniform(size=1000)
    worst = min(
        prox_inequality_residual(space, f, entry.c, entry.x0, res.point, space.take(Y, i), lam[i])
        for i in range(1000)
    )
    assert worst >= -1e-6


@pytest.mark.parametrize("entry", catalog(), ids=lambda e: e.name)
def test_descent_property(entry):
    space, f = entry.space, entry.objective
    res = prox(space, f, ProxParams(beta=entry.c), entry.x0)
    assert res.objective <= f(entry.x0) + 1e-12
    assert res.objective < f(entry.x0)


def test_fixed_point_gap_closed_form():
    f = parse_objective(E1, "quadratic")
    assert abs(fixed_point_gap(E1, f, ProxParams(), [1.0]) - 2.0 / 3.0) < 1e-12
    assert fixed_point_gap(E1, f, ProxParams(), [0.0]) == 0.0


def test_product_separable_matches_componentwise():
    P = parse_space("product:euclidean:1+hyperboloid:2")
    f = parse_objective(P, "quadratic:a=1,c=0.5;-0.4,0.2")
    x = P.validate((np.array([-1.0]), P.components[1].lift([1.0, 1.0])))
    sep = prox(P, f, ProxParams(), x)
    # the joint solve runs generic line searches; a lighter budget keeps it quick
    light = ProxParams(coarse_points=5, starts=1, refine_iters=30)
    joint = prox(P, f.__class__(**{**f.__dict__, "parts": None}), light, x)
    assert P.distance(sep.point, joint.point) < 1e-6
    assert sep.objective <= joint.objective + 1e-9


def test_generic_objective_path():
    space = Euclidean(2)
    obj = Objective(space=space, func=lambda y: float(abs(y[0]) + y[1] ** 2), gamma=0.1, descriptor="custom")
    res = prox(space, obj, ProxParams(), [2.0, 1.0])
    # separable: soft threshold in the first coordinate, y/3 in the second
    np.testing.assert_allclose(res.point, [1.0, 1.0 / 3.0], atol=1e-7)


def test_tree_generic_objective_path():
    T = load_tree_fixture("path3")
    base = parse_objective(T, "quadratic:c=v1")
    obj = Objective(space=T, func=base.func, gamma=2.0, descriptor="custom")
    a = prox(T, obj, ProxParams(beta=0.5), TreePoint(1, 3.0))
    b = prox(T, base, ProxParams(beta=0.5), TreePoint(1, 3.0))
    assert T.distance(a.point, b.point) < 1e-7


def test_nonfinite_objective_raises():
    obj = Objective(space=E1, func=lambda y: float("nan") if y[0] < 0.5 else float(y[0] ** 2), gamma=1.0)
    with pytest.raises(NonFiniteObjective):
        prox(E1, obj, ProxParams(), [2.0])


def test_prox_deterministic():
    e = catalog_entry("maxcombo-e2")
    a = prox(e.space, e.objective, ProxParams(beta=0.5), e.x0)
    b = prox(e.space, e.objective, ProxParams(beta=0.5), e.x0)
    np.testing.assert_array_equal(a.point, b.point)
    assert a.evaluations == b.evaluations
