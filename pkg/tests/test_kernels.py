import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sqprox import _pykernels, kernels
from sqprox.spaces import Hyperboloid

BACKENDS = kernels.backends()
needs_c = pytest.mark.skipif("cython" not in BACKENDS, reason="compiled kernels not built")

coord = st.floats(-3, 3, allow_nan=False)


def _points(kind, vals, dim):
    arr = np.array(vals, dtype=float).reshape(-1, dim)
    if kind == kernels.HYPER:
        H = Hyperboloid(dim)
        return np.array([H.lift(row) for row in arr])
    return arr


def test_backend_reported():
    assert kernels.BACKEND in BACKENDS


@needs_c
@given(
    kind=st.sampled_from([kernels.EUCLID, kernels.HYPER]),
    prof=st.sampled_from(sorted(kernels.PROFILES.values())),
    vals=st.lists(coord, min_size=8, max_size=8),
    inv2beta=st.floats(0.05, 5),
)
def test_composite_grid_backends_agree(kind, prof, vals, inv2beta):
    P = _points(kind, vals[:4], 2)
    x, c = _points(kind, vals[4:6], 2)[0], _points(kind, vals[6:8], 2)[0]
    ref = _pykernels.composite_grid(kind, P, x, c, prof, 1.3, 1.0, inv2beta)
    got = BACKENDS["cython"].composite_grid(kind, P, x, c, prof, 1.3, 1.0, inv2beta)
    np.testing.assert_allclose(got, ref, rtol=1e-12, atol=1e-12)


@needs_c
@given(
    kind=st.sampled_from([kernels.EUCLID, kernels.HYPER]),
    prof=st.sampled_from(sorted(kernels.PROFILES.values())),
    vals=st.lists(coord, min_size=8, max_size=8),
    inv2beta=st.floats(0.05, 5),
)
def test_golden_segment_backends_agree(kind, prof, vals, inv2beta):
    p, q, x, c = _points(kind, vals, 2)
    lam_r, d_r, z_r, n_r = _pykernels.golden_segment(kind, p, q, x, c, prof, 0.7, 1.0, inv2beta, 40)
    lam_c, d_c, z_c, n_c = BACKENDS["cython"].golden_segment(kind, p, q, x, c, prof, 0.7, 1.0, inv2beta, 40)
    assert n_r == n_c
    assert abs(d_r - d_c) <= 1e-9 * max(1.0, abs(d_r))
    # equal deltas may be reached at different lambdas only on flat stretches
    if abs(lam_r - lam_c) > 1e-9:
        assert abs(d_r - d_c) < 1e-12
    else:
        np.testing.assert_allclose(z_c, z_r, atol=1e-9)


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_golden_finds_segment_minimum(name):
    k = BACKENDS[name]
    # quadratic bowl at 0 plus prox term around x=2 in R^1: minimizer y = 2/3 (a=1, beta=1)
    lam, delta, z, n = k.golden_segment(kernels.EUCLID, np.array([-1.0]), np.array([2.0]),
                                        np.array([2.0]), np.array([0.0]), 0, 1.0, 0.0, 0.5, 80)
    # one golden search resolves the minimizer to about sqrt(machine eps)
    assert abs(z[0] - 2.0 / 3.0) < 1e-7
    assert delta < 0
    assert n == 83


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_golden_returns_start_when_nothing_better(name):
    k = BACKENDS[name]
    lam, delta, z, _ = k.golden_segment(kernels.EUCLID, np.array([0.0]), np.array([1.0]),
                                        np.array([0.0]), np.array([0.0]), 0, 1.0, 0.0, 0.5, 30)
    assert lam == 0.0 and delta == 0.0
    assert z[0] == 0.0


def test_euclidean_delta_resolves_tiny_scales():
    # the composite near 3**-20 is about 1e-19; deltas are formed without cancellation,
    # so a search on a short segment next to the minimizer is still resolved
    s = 3.0**-20
    p = np.array([s / 3.0 * (1 - 1e-6)])
    q = np.array([s / 3.0 * (1 + 1e-6)])
    lam, delta, z, _ = kernels.golden_segment(kernels.EUCLID, p, q, np.array([s]), np.array([0.0]),
                                              0, 1.0, 0.0, 0.5, 80)
    assert delta < 0
    assert abs(z[0] / s - 1.0 / 3.0) < 1e-12
