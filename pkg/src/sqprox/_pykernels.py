"""Pure-Python prox kernels; reference semantics for ``_ckernels``.

Both modules expose the same two functions operating on vector models
(``kind`` 0 = Euclidean, 1 = hyperboloid) and radial objectives
``a * g(d(y, c))`` where ``g`` is selected by ``prof``:

    0 quadratic  r**2        1 distance   r
    2 sqrt       sqrt(r)     3 maxcombo   max(sqrt(r), r**2 - k)
    4 negquad    -r**2

The composite minimized by the prox is ``a*g(d(y,c)) + inv2beta * d(y,x)**2``.
"""

import math

import numpy as np

EUCLID, HYPER = 0, 1
QUAD, DIST, SQRT, MAXCOMBO, NEGQUAD = 0, 1, 2, 3, 4
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
SMALL_DIST = 1e-8


def _profile(prof, r, a, k):
    if prof == QUAD:
        return a * r * r
    if prof == DIST:
        return a * r
    if prof == SQRT:
        return a * math.sqrt(r)
    if prof == MAXCOMBO:
        return a * max(math.sqrt(r), r * r - k)
    return -a * r * r


def _profile_np(prof, r, a, k):
    if prof == QUAD:
        return a * r * r
    if prof == DIST:
        return a * r
    if prof == SQRT:
        return a * np.sqrt(r)
    if prof == MAXCOMBO:
        return a * np.maximum(np.sqrt(r), r * r - k)
    return -a * r * r


def _profile_delta(prof, rp, ry, d2, a, k):
    """``g(ry) - g(rp)`` from an accurately computed ``d2 = ry**2 - rp**2``."""
    if prof == QUAD:
        return a * d2
    if prof == NEGQUAD:
        return -a * d2
    s = ry + rp
    d1 = d2 / s if s > 0.0 else 0.0
    if prof == DIST:
        return a * d1
    sq = math.sqrt(ry) + math.sqrt(rp)
    dsqrt = d1 / sq if sq > 0.0 else 0.0
    if prof == SQRT:
        return a * dsqrt
    bp = rp * rp - k > math.sqrt(rp)
    by = ry * ry - k > math.sqrt(ry)
    if bp and by:
        return a * d2
    if not bp and not by:
        return a * dsqrt
    return a * (max(math.sqrt(ry), ry * ry - k) - max(math.sqrt(rp), rp * rp - k))


def _mink(x, y):
    s = -x[0] * y[0]
    for i in range(1, len(x)):
        s += x[i] * y[i]
    return s


def _hdist(x, y):
    m = -_mink(x, y)
    if m < 2.0:
        diff = [xi - yi for xi, yi in zip(x, y)]
        sq = max(_mink(diff, diff), 0.0)
        return 2.0 * math.asinh(0.5 * math.sqrt(sq))
    return math.acosh(m)


def _hgeo(p, q, lam, t):
    if t < SMALL_DIST:
        ca, cb = 1.0 - lam, lam
    else:
        s = math.sinh(t)
        ca, cb = math.sinh((1.0 - lam) * t) / s, math.sinh(lam * t) / s
    z = [ca * pi + cb * qi for pi, qi in zip(p, q)]
    z[0] = math.sqrt(1.0 + sum(v * v for v in z[1:]))
    return z


def composite_grid(kind, P, x, c, prof, a, k, inv2beta):
    P = np.asarray(P, dtype=float)
    x = np.asarray(x, dtype=float)
    c = np.asarray(c, dtype=float)
    if kind == EUCLID:
        rc = np.sqrt(np.sum((P - c) ** 2, axis=1))
        rx2 = np.sum((P - x) ** 2, axis=1)
    else:
        from .spaces.hyperboloid import hyperbolic_distance

        rc = hyperbolic_distance(P, c)
        rx2 = hyperbolic_distance(P, x) ** 2
    return _profile_np(prof, rc, a, k) + inv2beta * rx2


def golden_segment(kind, p, q, x, c, prof, a, k, inv2beta, iters):
    """Golden-section search of the composite on the geodesic ``[p, q]``.

    Returns ``(lam, delta, point, nevals)`` where ``delta`` is the composite
    at ``point = W(p, q, lam)`` minus the composite at ``p``; ``lam = 0`` and
    ``delta = 0`` when nothing beats ``p``.
    """
    p = [float(v) for v in p]
    q = [float(v) for v in q]
    x = [float(v) for v in x]
    c = [float(v) for v in c]

    if kind == EUCLID:
        u = [qi - pi for pi, qi in zip(p, q)]
        uu = sum(v * v for v in u)
        upx = sum(ui * (pi - xi) for ui, pi, xi in zip(u, p, x))
        upc = sum(ui * (pi - ci) for ui, pi, ci in zip(u, p, c))
        rp = math.sqrt(sum((pi - ci) ** 2 for pi, ci in zip(p, c)))

        def point(lam):
            return [pi + lam * ui for pi, ui in zip(p, u)]

        def delta(lam):
            y = point(lam)
            ry = math.sqrt(sum((yi - ci) ** 2 for yi, ci in zip(y, c)))
            d2c = 2.0 * lam * upc + lam * lam * uu
            d2x = 2.0 * lam * upx + lam * lam * uu
            return _profile_delta(prof, rp, ry, d2c, a, k) + inv2beta * d2x

    else:
        t = _hdist(p, q)
        base = _profile(prof, _hdist(p, c), a, k) + inv2beta * _hdist(p, x) ** 2

        def point(lam):
            return _hgeo(p, q, lam, t)

        def delta(lam):
            y = point(lam)
            return _profile(prof, _hdist(y, c), a, k) + inv2beta * _hdist(y, x) ** 2 - base

    best_lam, best_val = 0.0, 0.0
    nevals = 0

    def consider(lam, val):
        nonlocal best_lam, best_val
        if val < best_val:
            best_lam, best_val = lam, val

    f_end = delta(1.0)
    consider(1.0, f_end)
    lo, hi = 0.0, 1.0
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    f1 = delta(x1)
    f2 = delta(x2)
    consider(x1, f1)
    consider(x2, f2)
    nevals = 3
    for _ in range(iters):
        if f1 <= f2:
            hi = x2
            x2, f2 = x1, f1
            x1 = hi - GOLDEN * (hi - lo)
            f1 = delta(x1)
            consider(x1, f1)
        else:
            lo = x1
            x1, f1 = x2, f2
            x2 = lo + GOLDEN * (hi - lo)
            f2 = delta(x2)
            consider(x2, f2)
        nevals += 1
    return best_lam, best_val, np.array(point(best_lam)), nevals
