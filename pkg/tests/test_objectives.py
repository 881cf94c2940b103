import math

import numpy as np
import pytest

from sqprox.errors import InvalidParameter, InvalidPoint, UnknownDescriptor
from sqprox.objectives import (
    FITTED_DIST_R5,
    FITTED_MAXCOMBO,
    FITTED_SQRT_R5,
    GAMMA_GRID,
    catalog,
    catalog_entry,
    check_sqc,
    evaluate,
    parse_objective,
    sqc_residual,
)
from sqprox.spaces import Euclidean, RandomSampler, parse_space

E2 = Euclidean(2)


def test_evaluate_examples():
    assert evaluate(parse_objective(E2, "quadratic:a=1,c=0,0"), [3, 4]) == 25.0
    assert evaluate(parse_objective(E2, "dist:c=0,0"), [3, 4]) == 5.0
    assert evaluate(parse_objective(E2, "maxcombo:k=1,R=5"), [1, 0]) == 1.0


def test_evaluate_kind_mismatch():
    with pytest.raises(InvalidPoint):
        evaluate(parse_objective(E2, "quadratic"), [1, 2, 3])


def test_sqc_residual_hand_value():
    f = parse_objective(E2, "quadratic:a=1,c=0,0")
    assert abs(sqc_residual(f, E2, [0, 0], [2, 0], 0.5) - 2.0) < 1e-14


def test_sqc_residual_endpoints_and_degenerate():
    f = parse_objective(E2, "dist:c=1,1")
    x, y = np.array([0.2, -1.0]), np.array([2.0, 0.5])
    r0 = sqc_residual(f, E2, x, y, 0.0)
    assert abs(r0 - (max(f(x), f(y)) - f(x))) < 1e-14
    assert sqc_residual(f, E2, x, x, 0.37) == 0.0
    with pytest.raises(InvalidParameter):
        sqc_residual(f, E2, x, y, -0.1)


def test_concave_fails_check():
    f = parse_objective(E2, "negquad:R=5")
    rep = check_sqc(f, E2, RandomSampler(0), 2000, 1e-8)
    assert not rep.passed
    assert rep.min_residual < -1e-8
    assert rep.estimated_gamma == 0.0


def test_report_pass_iff_residual():
    for e in catalog()[:4]:
        rep = check_sqc(e.objective, e.space, RandomSampler(1), 500, 1e-8)
        assert rep.passed == (rep.min_residual >= -rep.tolerance)


def test_estimated_gamma_on_grid_and_consistent():
    f = parse_objective(E2, "quadratic:a=0.5")
    rep = check_sqc(f, E2, RandomSampler(2), 2000, 1e-8)
    assert rep.estimated_gamma in GAMMA_GRID
    # quadratic a d^2 is exactly 2a-strongly quasiconvex on the diagonal-free samples
    assert rep.estimated_gamma == 1.0
    assert check_sqc(f, E2, RandomSampler(2), 2000, 1e-8, gamma=rep.estimated_gamma).passed


def test_fitted_moduli_frozen():
    # analytic lower bounds on the radius-5 ball are 1/5, 1/(2 * 5**1.5)
    assert FITTED_DIST_R5 <= 1 / 5
    assert FITTED_SQRT_R5 <= 1 / (2 * 5**1.5)
    assert FITTED_MAXCOMBO[(1.0, 5.0)] == 0.25
    assert catalog_entry("dist-e2").objective.gamma_source == "fitted"


@pytest.mark.parametrize("desc, key", [("dist:c=0,0,R=5", FITTED_DIST_R5), ("sqrtnorm:R=5", FITTED_SQRT_R5)])
def test_fitted_gamma_is_reproduced_by_estimator(desc, key):
    f = parse_objective(E2, desc)
    rep = check_sqc(f, E2, RandomSampler(0), 10_000, 1e-8)
    assert rep.passed
    assert rep.estimated_gamma >= key


def test_radius_scaling_of_moduli():
    a = parse_objective(E2, "dist:R=5").gamma
    b = parse_objective(E2, "dist:R=10").gamma
    assert abs(a / b - 2.0) < 1e-12
    a = parse_objective(E2, "sqrtnorm:R=5").gamma
    b = parse_objective(E2, "sqrtnorm:R=20").gamma
    assert abs(a / b - 8.0) < 1e-12


def test_untabulated_maxcombo_gets_fitted_gamma():
    f = parse_objective(E2, "maxcombo:k=2,R=3")
    assert f.gamma_source == "fitted"
    assert check_sqc(f, E2, RandomSampler(11), 5000, 1e-8).passed


def test_descriptor_errors():
    for bad in ("cubic:a=1", "quadratic:a=1,a=2", "quadratic:z=1", "quadratic:a=x", "quadratic:c=1,2,3"):
        with pytest.raises(UnknownDescriptor):
            parse_objective(E2, bad)
    with pytest.raises(InvalidParameter):
        parse_objective(E2, "quadratic:a=-1")


def test_gamma_override():
    f = parse_objective(E2, "dist:gamma=0.01")
    assert f.gamma == 0.01 and f.gamma_source == "user"


def test_catalog_shape():
    entries = catalog()
    assert len(entries) >= 8
    kinds = {e.space.kind for e in entries}
    assert {"euclidean", "hyperboloid", "tree", "product"} <= kinds
    names = [e.name for e in entries]
    assert len(set(names)) == len(names)
    e = catalog_entry("quadratic-e2")
    np.testing.assert_array_equal(e.objective.known_minimizer, [1, 1])
    assert e.objective.known_min == 0.0 and e.objective.gamma == 1.0
    mc = catalog_entry("maxcombo-e2").objective
    np.testing.assert_array_equal(mc.known_minimizer, [0, 0])
    with pytest.raises(UnknownDescriptor):
        catalog_entry("nope")


@pytest.mark.parametrize("entry", catalog(), ids=lambda e: e.name)
def test_catalog_invariants(entry):
    f, space = entry.objective, entry.space
    assert f.gamma > 0 and math.isfinite(f.gamma)
    assert abs(f(f.known_minimizer) - f.known_min) <= 1e-9
    assert f.lower_bound <= f.known_min
    rep = check_sqc(f, space, RandomSampler(42), 10_000, 1e-8)
    assert rep.passed, rep
    # plain quasiconvexity (gamma = 0) as a consequence
    assert check_sqc(f, space, RandomSampler(43), 2000, 1e-9, gamma=0.0).passed


@pytest.mark.parametrize("entry", catalog(), ids=lambda e: e.name)
def test_minimizer_unique_on_samples(entry):
    f, space = entry.objective, entry.space
    rng = np.random.default_rng(5)
    if f.domain_radius is not None:
        Y = space.sample_ball(rng, 1000, f.center, f.domain_radius)
    else:
        Y = space.sample(rng, 1000)
    d = space.distance_batch(Y, space.repeat(f.known_minimizer, 1000))
    vals = f.eval_batch(Y)
    assert np.all(vals >= f.known_min)
    far = d >= 0.1
    assert np.all(vals[far] > f.known_min)


def test_eval_batch_matches_eval():
    space = parse_space("tree:spider")
    f = parse_objective(space, "quadratic:c=3@1.0")
    rng = np.random.default_rng(0)
    Y = space.sample(rng, 20)
    np.testing.assert_allclose(f.eval_batch(Y), [f(space.take(Y, i)) for i in range(20)], rtol=1e-13)
