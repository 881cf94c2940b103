# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled prox kernels. Semantics are defined by ``_pykernels``."""

import numpy as np

from libc.math cimport acosh, asinh, sinh, sqrt

DEF GOLDEN = 0.6180339887498949
DEF SMALL_DIST = 1e-8
DEF MAXDIM = 64

cdef enum:
    EUCLID = 0
    HYPER = 1

cdef enum:
    QUAD = 0
    DIST = 1
    SQRT = 2
    MAXCOMBO = 3
    NEGQUAD = 4


cdef inline double profile(int prof, double r, double a, double k) noexcept nogil:
    cdef double s
    if prof == QUAD:
        return a * r * r
    if prof == DIST:
        return a * r
    if prof == SQRT:
        return a * sqrt(r)
    if prof == MAXCOMBO:
        s = sqrt(r)
        if r * r - k > s:
            return a * (r * r - k)
        return a * s
    return -a * r * r


cdef inline double profile_delta(int prof, double rp, double ry, double d2,
                                 double a, double k) noexcept nogil:
    cdef double s, d1, sq, dsqrt, mp, my
    cdef bint bp, by
    if prof == QUAD:
        return a * d2
    if prof == NEGQUAD:
        return -a * d2
    s = ry + rp
    d1 = d2 / s if s > 0.0 else 0.0
    if prof == DIST:
        return a * d1
    sq = sqrt(ry) + sqrt(rp)
    dsqrt = d1 / sq if sq > 0.0 else 0.0
    if prof == SQRT:
        return a * dsqrt
    bp = rp * rp - k > sqrt(rp)
    by = ry * ry - k > sqrt(ry)
    if bp and by:
        return a * d2
    if not bp and not by:
        return a * dsqrt
    mp = rp * rp - k if bp else sqrt(rp)
    my = ry * ry - k if by else sqrt(ry)
    return a * (my - mp)


cdef inline double mink(const double *x, const double *y, int n) noexcept nogil:
    cdef double s = -x[0] * y[0]
    cdef int i
    for i in range(1, n):
        s += x[i] * y[i]
    return s


cdef inline double hdist(const double *x, const double *y, int n) noexcept nogil:
    cdef double m = -mink(x, y, n)
    cdef double sq, dt
    cdef int i
    if m < 2.0:
        dt = x[0] - y[0]
        sq = -dt * dt
        for i in range(1, n):
            dt = x[i] - y[i]
            sq += dt * dt
        if sq < 0.0:
            sq = 0.0
        return 2.0 * asinh(0.5 * sqrt(sq))
    return acosh(m)


cdef inline double edist2(const double *x, const double *y, int n) noexcept nogil:
    cdef double s = 0.0, dt
    cdef int i
    for i in range(n):
        dt = x[i] - y[i]
        s += dt * dt
    return s


cdef inline void hgeo(const double *p, const double *q, double lam, double t,
                      double *z, int n) noexcept nogil:
    cdef double ca, cb, s, acc = 0.0
    cdef int i
    if t < SMALL_DIST:
        ca = 1.0 - lam
        cb = lam
    else:
        s = sinh(t)
        ca = sinh((1.0 - lam) * t) / s
        cb = sinh(lam * t) / s
    for i in range(n):
        z[i] = ca * p[i] + cb * q[i]
    for i in range(1, n):
        acc += z[i] * z[i]
    z[0] = sqrt(1.0 + acc)


def composite_grid(int kind, double[:, ::1] P, double[::1] x, double[::1] c,
                   int prof, double a, double k, double inv2beta):
    cdef Py_ssize_t m = P.shape[0], i
    cdef int n = P.shape[1]
    out = np.empty(m)
    cdef double[::1] o = out
    cdef double rc, rx
    with nogil:
        for i in range(m):
            if kind == EUCLID:
                rc = sqrt(edist2(&P[i, 0], &c[0], n))
                o[i] = profile(prof, rc, a, k) + inv2beta * edist2(&P[i, 0], &x[0], n)
            else:
                rc = hdist(&P[i, 0], &c[0], n)
                rx = hdist(&P[i, 0], &x[0], n)
                o[i] = profile(prof, rc, a, k) + inv2beta * rx * rx
    return out


cdef struct Seg:
    int kind
    int n
    int prof
    double a
    double k
    double inv2beta
    double uu
    double upx
    double upc
    double rp
    double t
    double base


cdef inline double seg_delta(Seg *s, const double *p, const double *q,
                             const double *x, const double *c, double lam,
                             double *y) noexcept nogil:
    cdef int i
    cdef double ry, d2c, d2x, rx
    if s.kind == EUCLID:
        for i in range(s.n):
            y[i] = p[i] + lam * (q[i] - p[i])
        ry = sqrt(edist2(y, c, s.n))
        d2c = 2.0 * lam * s.upc + lam * lam * s.uu
        d2x = 2.0 * lam * s.upx + lam * lam * s.uu
        return profile_delta(s.prof, s.rp, ry, d2c, s.a, s.k) + s.inv2beta * d2x
    hgeo(p, q, lam, s.t, y, s.n)
    rx = hdist(y, x, s.n)
    return profile(s.prof, hdist(y, c, s.n), s.a, s.k) + s.inv2beta * rx * rx - s.base


def golden_segment(int kind, p_in, q_in, x_in, c_in, int prof, double a,
                   double k, double inv2beta, int iters):
    cdef double[::1] p = np.ascontiguousarray(p_in, dtype=float)
    cdef double[::1] q = np.ascontiguousarray(q_in, dtype=float)
    cdef double[::1] x = np.ascontiguousarray(x_in, dtype=float)
    cdef double[::1] c = np.ascontiguousarray(c_in, dtype=float)
    cdef int n = p.shape[0], i, it
    if n > MAXDIM:
        raise ValueError("dimension too large for the compiled kernel")
    cdef double y[MAXDIM]
    cdef Seg s
    cdef double lo = 0.0, hi = 1.0, x1, x2, f1, f2, fe, rx
    cdef double best_lam = 0.0, best_val = 0.0
    cdef int nevals = 0
    s.kind = kind
    s.n = n
    s.prof = prof
    s.a = a
    s.k = k
    s.inv2beta = inv2beta
    with nogil:
        if kind == EUCLID:
            s.uu = 0.0
            s.upx = 0.0
            s.upc = 0.0
            for i in range(n):
                s.uu += (q[i] - p[i]) * (q[i] - p[i])
                s.upx += (q[i] - p[i]) * (p[i] - x[i])
                s.upc += (q[i] - p[i]) * (p[i] - c[i])
            s.rp = sqrt(edist2(&p[0], &c[0], n))
        else:
            s.t = hdist(&p[0], &q[0], n)
            rx = hdist(&p[0], &x[0], n)
            s.base = profile(prof, hdist(&p[0], &c[0], n), a, k) + inv2beta * rx * rx

        fe = seg_delta(&s, &p[0], &q[0], &x[0], &c[0], 1.0, y)
        if fe < best_val:
            best_lam = 1.0
            best_val = fe
        x1 = hi - GOLDEN * (hi - lo)
        x2 = lo + GOLDEN * (hi - lo)
        f1 = seg_delta(&s, &p[0], &q[0], &x[0], &c[0], x1, y)
        if f1 < best_val:
            best_lam = x1
            best_val = f1
        f2 = seg_delta(&s, &p[0], &q[0], &x[0], &c[0], x2, y)
        if f2 < best_val:
            best_lam = x2
            best_val = f2
        nevals = 3
        for it in range(iters):
            if f1 <= f2:
                hi = x2
                x2 = x1
                f2 = f1
                x1 = hi - GOLDEN * (hi - lo)
                f1 = seg_delta(&s, &p[0], &q[0], &x[0], &c[0], x1, y)
                if f1 < best_val:
                    best_lam = x1
                    best_val = f1
            else:
                lo = x1
                x1 = x2
                f1 = f2
                x2 = lo + GOLDEN * (hi - lo)
                f2 = seg_delta(&s, &p[0], &q[0], &x[0], &c[0], x2, y)
                if f2 < best_val:
                    best_lam = x2
                    best_val = f2
            nevals += 1
        seg_delta(&s, &p[0], &q[0], &x[0], &c[0], best_lam, y)
    point = np.empty(n)
    for i in range(n):
        point[i] = y[i]
    return best_lam, best_val, point, nevals
