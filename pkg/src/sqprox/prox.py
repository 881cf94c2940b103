"""Proximal map solver, a brute-force oracle, and checkers for its properties.

``prox`` minimizes the composite ``f(y) + d^2(x, y) / (2 beta)``. Any
minimizer lies in the ball of radius ``sqrt(2 beta (f(x) - L))`` around
``x`` (``L`` the objective's lower bound), so the solver scans that ball
on a coarse grid and then refines the best few grid points by golden-section
searches along geodesics. Trees are refined edge by edge, since the
composite restricted to one edge is a function of a single offset.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from . import kernels
from .errors import InvalidParameter, NonFiniteObjective, UnsupportedSpace
from .spaces import Euclidean, Hyperboloid, Product, Tree
from .spaces.base import check_lambda
from .spaces.tree import TreeBatch, TreePoint

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
# pattern search stops once the step falls below this fraction of the radius
REL_STEP_FLOOR = 1e-13
ROUNDOFF = 1e-15


@dataclass(frozen=True)
class ProxParams:
    """Inner-solver settings; ``beta`` is the prox parameter."""

    beta: float = 1.0
    coarse_points: int = 33
    refine_iters: int = 60
    tol_inner: float = 1e-9
    starts: int = 5
    max_rounds: int = 500

    def __post_init__(self):
        if not (math.isfinite(self.beta) and self.beta > 0):
            raise InvalidParameter(f"beta must be positive, got {self.beta}")
        if int(self.coarse_points) < 3:
            raise InvalidParameter("coarse_points must be >= 3")
        if int(self.refine_iters) < 1:
            raise InvalidParameter("refine_iters must be >= 1")
        if not (self.tol_inner > 0):
            raise InvalidParameter("tol_inner must be positive")
        if int(self.starts) < 1 or int(self.max_rounds) < 1:
            raise InvalidParameter("starts and max_rounds must be >= 1")

    def with_beta(self, beta):
        return dataclasses.replace(self, beta=float(beta))


@dataclass
class ProxResult:
    point: Any
    objective: float
    search_radius: float
    evaluations: int
    value: float
    resolution: float = 0.0

    def to_dict(self, space):
        return {
            "point": space.point_to_json(self.point),
            "objective": self.objective,
            "value": self.value,
            "search_radius": self.search_radius,
            "evaluations": self.evaluations,
        }


def composite(space, f, beta, x, y):
    d = space.distance(x, y)
    return f.eval(y) + d * d / (2.0 * beta)


def composite_batch(space, f, beta, x, Y):
    d = space.distance_batch(Y, space.repeat(x, space.batch_len(Y)))
    vals = f.eval_batch(Y) + d * d / (2.0 * beta)
    if not np.all(np.isfinite(vals)):
        raise NonFiniteObjective("composite objective is not finite on the search grid")
    return vals


def prox_search_radius(f, beta, x):
    """Radius of a ball around ``x`` containing every prox point."""
    if not (beta > 0):
        raise InvalidParameter(f"beta must be positive, got {beta}")
    gap = f.eval(x) - f.lower_bound
    return math.sqrt(2.0 * beta * max(gap, 0.0))


def prox(space, f, params, x):
    """A point of ``Prox_{beta f}(x)`` for ``beta = params.beta``."""
    x = space.validate(x)
    beta = params.beta
    radius = prox_search_radius(f, beta, x)
    fx = f.eval(x)
    if radius == 0.0:
        return ProxResult(x, fx, 0.0, 1, fx)
    if isinstance(space, Tree):
        y, evals = _prox_tree(space, f, params, x, radius)
    elif isinstance(space, Product) and f.parts is not None:
        y, evals = _prox_separable(space, f, params, x)
    else:
        y, evals = _prox_pattern(space, f, params, x, radius)
    obj = composite(space, f, beta, x, y)
    if obj > fx:
        # never worse than staying put
        y, obj = x, fx
    d = space.distance(x, y)
    if d > radius:
        y = space.geodesic(x, y, radius / d)
        obj = composite(space, f, beta, x, y)
    return ProxResult(y, obj, radius, evals, f.eval(y))


# -- vector models and generic spaces -----------------------------------------------


def _golden_generic(space, f, inv2beta, x1, p, q, iters):
    """Golden-section search on ``[p, q]`` through the batch API (no kernels).

    Mirrors ``kernels.golden_segment``: returns ``(lam, delta, point, nevals)``
    with ``delta`` relative to the composite at ``p``.
    """
    p1, q1 = space.repeat(p, 1), space.repeat(q, 1)

    def comp(lam):
        z = space.geodesic_batch(p1, q1, np.array([lam]))
        val = float(f.eval_batch(z)[0] + inv2beta * space.distance_batch(z, x1)[0] ** 2)
        if not math.isfinite(val):
            raise NonFiniteObjective("composite objective is not finite")
        return val

    base = comp(0.0)
    best = [0.0, 0.0]

    def delta(lam):
        val = comp(lam) - base
        if val < best[1]:
            best[0], best[1] = lam, val
        return val

    delta(1.0)
    lo, hi = 0.0, 1.0
    x1_, x2 = hi - GOLDEN * (hi - lo), lo + GOLDEN * (hi - lo)
    f1, f2 = delta(x1_), delta(x2)
    for _ in range(iters):
        if f1 <= f2:
            hi, x2, f2 = x2, x1_, f1
            x1_ = hi - GOLDEN * (hi - lo)
            f1 = delta(x1_)
        else:
            lo, x1_, f1 = x1_, x2, f2
            x2 = lo + GOLDEN * (hi - lo)
            f2 = delta(x2)
    lam, val = best
    z = space.geodesic(p, q, lam) if lam > 0 else p
    return lam, val, z, iters + 4


def _prox_pattern(space, f, params, x, radius):
    beta = params.beta
    inv2beta = 0.5 / beta
    spec = f.kernel_spec()
    grid, h0 = space.ball_grid(x, radius, params.coarse_points)
    if spec is not None:
        kind, c, prof, a, k = spec
        vals = kernels.composite_grid(kind, grid, x, c, prof, a, k, inv2beta)
        if not np.all(np.isfinite(vals)):
            raise NonFiniteObjective("composite objective is not finite on the search grid")

        def line(p, q):
            return kernels.golden_segment(kind, p, q, x, c, prof, a, k, inv2beta, params.refine_iters)

    else:
        vals = composite_batch(space, f, beta, x, grid)
        x1 = space.repeat(x, 1)

        def line(p, q):
            return _golden_generic(space, f, inv2beta, x1, p, q, params.refine_iters)

    evals = len(vals)
    order = np.argsort(vals, kind="stable")[: params.starts]
    starts = [(space.take(grid, int(i)), float(vals[i])) for i in order]
    seeds, n = _segment_seeds(space, f, beta, x, radius, params.coarse_points)
    starts.extend(seeds)
    evals += n
    h_floor = REL_STEP_FLOOR * radius
    best_p, best_v = None, math.inf
    for p, v in starts:
        h = h0
        for _ in range(params.max_rounds):
            if h < h_floor:
                break
            gain, hit_end = 0.0, False
            for q in space.neighbors(p, h):
                lam, delta, z, n = line(p, q)
                evals += n
                if delta < 0.0:
                    p, v = space.validate(z), v + delta
                    gain -= delta
                    hit_end = hit_end or lam > 0.99
            # grow while line searches run off the end, otherwise contract
            if hit_end and gain > ROUNDOFF * abs(v):
                h = min(2.0 * h, radius)
            else:
                h *= 0.5
        # later starts must win by more than the tie tolerance
        if best_p is None or v < best_v - params.tol_inner:
            best_p, best_v = p, v
    return best_p, evals


NONDECREASING = ("quadratic", "dist", "sqrtnorm", "maxcombo")


def _segment_seeds(space, f, beta, x, radius, points):
    """Extra starts for radial objectives with a nondecreasing profile.

    Moving any ``y`` to the point of ``[c, x]`` at distance
    ``min(d(y, c), d(x, c))`` from ``c`` lowers neither term of the
    composite, so some minimizer lies on the geodesic from ``x`` to the
    center. A dense scan of that segment, plus the center itself, seeds the
    basins a coarse ball grid can miss (e.g. next to a square-root cusp).
    """
    if f.profile not in NONDECREASING or f.center is None:
        return [], 0
    c = f.center
    dxc = space.distance(x, c)
    if dxc == 0.0:
        return [], 0
    # only the part of the segment inside the search ball can hold a minimizer
    t_max = min(1.0, radius / dxc)
    m = 4 * int(points) + 1
    t = np.linspace(0.0, t_max, m)
    Y = space.geodesic_batch(space.repeat(x, m), space.repeat(c, m), t)
    vals = composite_batch(space, f, beta, x, Y)
    i = int(np.argmin(vals))
    seeds = [(space.take(Y, i), float(vals[i]))]
    if t_max == 1.0:
        seeds.append((c, composite(space, f, beta, x, c)))
    return seeds, m + 1


def _prox_separable(space, f, params, x):
    parts, evals = [], 0
    for comp_space, fi, xi in zip(space.components, f.parts, x):
        res = prox(comp_space, fi, params, xi)
        parts.append(res.point)
        evals += res.evaluations
    return tuple(parts), evals


# -- trees ------------------------------------------------------------------------------


def _golden_interval(fun, lo, hi, iters):
    """Minimize ``fun`` on ``[lo, hi]``; endpoints included, first best wins."""
    best_t, best_v = lo, fun(lo)
    v = fun(hi)
    if v < best_v:
        best_t, best_v = hi, v
    a, b = lo, hi
    x1, x2 = b - GOLDEN * (b - a), a + GOLDEN * (b - a)
    f1, f2 = fun(x1), fun(x2)
    for t, val in ((x1, f1), (x2, f2)):
        if val < best_v:
            best_t, best_v = t, val
    for _ in range(iters):
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - GOLDEN * (b - a)
            f1 = fun(x1)
            t, val = x1, f1
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + GOLDEN * (b - a)
            f2 = fun(x2)
            t, val = x2, f2
        if val < best_v:
            best_t, best_v = t, val
    return best_t, best_v, iters + 4


def _edge_function(space, f, beta, x, e, xprof):
    """Composite on edge ``e`` as a function of the offset."""
    ell = space.edges[e][2]
    inv2beta = 0.5 / beta
    if f.profile is not None:
        cprof = space.edge_profile(f.center, e)
        prof, a, k = f.profile, f.weight, f.k

        def fun(t):
            rc = float(space.profile_distance(cprof, ell, t))
            rx = float(space.profile_distance(xprof, ell, t))
            if prof == "quadratic":
                g = rc * rc
            elif prof == "dist":
                g = rc
            elif prof == "sqrtnorm":
                g = math.sqrt(rc)
            elif prof == "maxcombo":
                g = max(math.sqrt(rc), rc * rc - k)
            else:
                g = -rc * rc
            return a * g + inv2beta * rx * rx

    else:

        def fun(t):
            y = TreePoint(e, t)
            rx = float(space.profile_distance(xprof, ell, t))
            return f.eval(y) + inv2beta * rx * rx

    return fun


def _prox_tree(space, f, params, x, radius):
    beta = params.beta
    intervals = space.edge_intervals(x, radius)
    es, ts, steps, which = [], [], [], []
    for j, (e, lo, hi, _) in enumerate(intervals):
        m = int(params.coarse_points)
        ticks = np.linspace(lo, hi, m) if hi > lo else np.array([lo])
        es.extend([e] * len(ticks))
        ts.extend(ticks.tolist())
        steps.extend([(hi - lo) / (m - 1)] * len(ticks))
        which.extend([j] * len(ticks))
    batch = TreeBatch(np.array(es, dtype=np.int64), np.array(ts))
    vals = composite_batch(space, f, beta, x, batch)
    evals = len(vals)
    order = np.argsort(vals, kind="stable")[: params.starts]
    best_p, best_v = x, composite(space, f, beta, x, x)
    for p, v in _segment_seeds(space, f, beta, x, radius, params.coarse_points)[0]:
        if v < best_v - params.tol_inner:
            best_p, best_v = p, v
    funs = {}
    for idx in order:
        j = which[idx]
        e, lo, hi, xprof = intervals[j]
        if j not in funs:
            funs[j] = _edge_function(space, f, beta, x, e, xprof)
        t0, h = ts[idx], steps[idx]
        t, v, n = _golden_interval(funs[j], max(lo, t0 - h), min(hi, t0 + h), params.refine_iters)
        evals += n
        if v < best_v - params.tol_inner:
            best_p, best_v = space.validate(TreePoint(e, t)), v
    return best_p, evals


# -- oracle and checkers ---------------------------------------------------------------


def _nested_ticks(density):
    # 2*density+1 ticks on [-1, 1]; doubling density refines the same grid
    return np.linspace(-1.0, 1.0, 2 * int(density) + 1)


def prox_oracle(space, f, beta, x, grid_density=100):
    """Best point of a dense deterministic grid over the search ball (test oracle).

    For radial objectives with a nondecreasing profile the geodesic from
    ``x`` to the center, center included, is gridded too.
    """
    if grid_density < 10:
        raise InvalidParameter("grid_density must be >= 10")
    x = space.validate(x)
    radius = prox_search_radius(f, beta, x)
    ticks = _nested_ticks(grid_density)
    if type(space) in (Euclidean, Hyperboloid) and space.dim <= 2:
        if space.dim == 1:
            off = ticks[:, None]
        else:
            off = np.stack(np.meshgrid(ticks, ticks, indexing="ij"), axis=-1).reshape(-1, 2)
            off = off[np.hypot(off[:, 0], off[:, 1]) <= 1.0]
        if isinstance(space, Euclidean):
            Y = x + radius * off
        else:
            Y = space.exp_batch(x, radius * off @ space.tangent_basis(x))
    elif isinstance(space, Tree):
        es, ts = [], []
        for e, lo, hi, _ in space.edge_intervals(x, radius):
            es.extend([e] * len(ticks))
            ts.extend((lo + (hi - lo) * (ticks + 1.0) / 2.0).tolist())
        Y = TreeBatch(np.array(es, dtype=np.int64), np.array(ts))
    else:
        raise UnsupportedSpace(f"prox_oracle does not support {space.descriptor}")
    d = space.distance_batch(Y, space.repeat(x, space.batch_len(Y)))
    vals = f.eval_batch(Y) + d * d / (2.0 * beta)
    i = int(np.argmin(vals))
    y = space.take(Y, i)
    best = float(vals[i])
    n_eval = len(vals)
    # a ball grid misses a cusp at the center; for a nondecreasing radial
    # profile some minimizer lies on [x, c], so grid that segment as well
    if f.profile in NONDECREASING and f.center is not None:
        dxc = space.distance(x, f.center)
        if dxc > 0.0:
            m = 2 * grid_density + 1
            t = np.linspace(0.0, min(1.0, radius / dxc), m)
            S = space.geodesic_batch(space.repeat(x, m), space.repeat(f.center, m), t)
            sv = composite_batch(space, f, beta, x, S)
            n_eval += m
            j = int(np.argmin(sv))
            if sv[j] < best:
                y, best = space.take(S, j), float(sv[j])
            if t[-1] == 1.0:
                cv = composite(space, f, beta, x, f.center)
                n_eval += 1
                if cv < best:
                    y, best = f.center, cv
    # objective change across one grid step around the winner
    h = radius / grid_density
    resolution = 0.0
    if h > 0:
        nb = [composite(space, f, beta, x, q) for q in space.neighbors(y, h)]
        resolution = max(abs(v - best) for v in nb)
    return ProxResult(y, best, radius, n_eval, f.eval(y), resolution)


def prox_inequality_residual(space, f, beta, x, xbar, y, lam):
    """Slack of the key inequality satisfied by a prox point ``xbar`` of ``x``.

    ``max{f(y), f(xbar)} + (lam/2)(lam/beta - gamma + lam gamma) d^2(y, xbar)
    + (lam/beta) <x xbar, xbar y> - f(xbar)``.
    """
    lam = check_lambda(lam)
    if not (beta > 0):
        raise InvalidParameter("beta must be positive")
    g = f.gamma
    fy, fb = f.eval(y), f.eval(xbar)
    d2 = space.distance(y, xbar) ** 2
    ql = space.quasilin(x, xbar, xbar, y)
    return max(fy, fb) + 0.5 * lam * (lam / beta - g + lam * g) * d2 + (lam / beta) * ql - fb


def fixed_point_gap(space, f, params, x):
    """``d(x, prox(x))``; zero exactly at minimizers."""
    return space.distance(x, prox(space, f, params, x).point)


__all__ = [
    "ProxParams",
    "ProxResult",
    "composite",
    "fixed_point_gap",
    "prox",
    "prox_inequality_residual",
    "prox_oracle",
    "prox_search_radius",
]
