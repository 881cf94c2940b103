"""Hyperboloid model of real hyperbolic space of curvature -1.

Points are vectors ``(t, x_1, ..., x_n)`` with ``t**2 - sum(x_i**2) = 1`` and
``t >= 1``. After every arithmetic operation the time coordinate is solved
for again so the constraint holds to rounding.
"""

from __future__ import annotations

import numpy as np

from ..errors import InvalidParameter, InvalidPoint
from .base import Space, check_lambda_array
from .euclidean import axis_grid

SMALL_DIST = 1e-8


def minkowski(X, Y):
    X = np.asarray(X)
    Y = np.asarray(Y)
    return -X[..., 0] * Y[..., 0] + np.sum(X[..., 1:] * Y[..., 1:], axis=-1)


def reproject(Z):
    Z = np.array(Z, dtype=float, copy=True)
    Z[..., 0] = np.sqrt(1.0 + np.sum(Z[..., 1:] ** 2, axis=-1))
    return Z


def hyperbolic_distance(X, Y):
    """Distance via ``arccosh(-<x,y>)``; the half-angle form is used for close pairs."""
    m = -minkowski(X, Y)
    diff = np.asarray(X) - np.asarray(Y)
    sq = np.maximum(minkowski(diff, diff), 0.0)
    near = 2.0 * np.arcsinh(0.5 * np.sqrt(sq))
    far = np.arccosh(np.maximum(m, 1.0))
    return np.where(m < 2.0, near, far)


class Hyperboloid(Space):
    kind = "hyperboloid"

    def __init__(self, dim, sample_scale=1.0):
        dim = int(dim)
        if dim < 1:
            raise InvalidParameter("hyperboloid dimension must be >= 1")
        self.dim = dim
        self.sample_scale = float(sample_scale)

    @property
    def descriptor(self):
        return f"hyperboloid:{self.dim}"

    def lift(self, spatial):
        spatial = np.atleast_1d(np.asarray(spatial, dtype=float))
        return np.concatenate([[np.sqrt(1.0 + spatial @ spatial)], spatial])

    def validate(self, x):
        try:
            arr = np.atleast_1d(np.asarray(x, dtype=float))
        except (TypeError, ValueError) as exc:
            raise InvalidPoint(f"{self.descriptor}: not a coordinate vector: {x!r}") from exc
        if arr.shape != (self.dim + 1,):
            raise InvalidPoint(f"{self.descriptor} expects {self.dim + 1} coordinates, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidPoint("coordinates must be finite")
        t = arr[0]
        if t < 1.0 - 1e-9 or abs(minkowski(arr, arr) + 1.0) > 1e-9 * max(1.0, t * t):
            raise InvalidPoint(f"point {arr.tolist()} is not on the hyperboloid")
        return arr

    def distance(self, x, y):
        x, y = self.validate(x), self.validate(y)
        return float(hyperbolic_distance(x, y))

    def distance_batch(self, X, Y):
        return hyperbolic_distance(X, Y)

    def geodesic_batch(self, X, Y, lam):
        lam = check_lambda_array(lam)
        X = np.asarray(X, dtype=float)
        Y = np.asarray(Y, dtype=float)
        t = hyperbolic_distance(X, Y)
        small = t < SMALL_DIST
        safe_t = np.where(small, 1.0, t)
        s = np.sinh(safe_t)
        a = np.where(small, 1.0 - lam, np.sinh((1.0 - lam) * safe_t) / s)
        b = np.where(small, lam, np.sinh(lam * safe_t) / s)
        return reproject(a[:, None] * X + b[:, None] * Y)

    # -- exponential map -----------------------------------------------------
    def exp(self, x, v):
        v = np.asarray(v, dtype=float)
        nv = np.sqrt(max(minkowski(v, v), 0.0))
        if nv == 0.0:
            return np.array(x, dtype=float)
        return reproject(np.cosh(nv) * x + np.sinh(nv) * (v / nv))

    def exp_batch(self, x, V):
        nv = np.sqrt(np.maximum(minkowski(V, V), 0.0))
        safe = np.where(nv > 0, nv, 1.0)
        out = np.cosh(nv)[:, None] * x + (np.sinh(nv) / safe)[:, None] * V
        return reproject(out)

    def log(self, x, y):
        d = float(hyperbolic_distance(x, y))
        u = y + minkowski(x, y) * x
        nu = np.sqrt(max(minkowski(u, u), 0.0))
        if nu == 0.0:
            return np.zeros_like(x)
        return d * u / nu

    def tangent_basis(self, x):
        """Minkowski-orthonormal basis of the tangent space at ``x``."""
        basis = []
        for i in range(1, self.dim + 1):
            e = np.zeros(self.dim + 1)
            e[i] = 1.0
            v = e + minkowski(e, x) * x
            for b in basis:
                v = v - minkowski(v, b) * b
            basis.append(v / np.sqrt(minkowski(v, v)))
        return np.array(basis)

    def sample(self, rng, n):
        V = np.zeros((n, self.dim + 1))
        V[:, 1:] = self.sample_scale * rng.normal(size=(n, self.dim))
        return self.exp_batch(self.origin(), V)

    def sample_ball(self, rng, n, center, radius):
        center = self.validate(center)
        g = rng.normal(size=(n, self.dim))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        r = radius * rng.uniform(size=n) ** (1.0 / self.dim)
        V = (g * r[:, None]) @ self.tangent_basis(center)
        return self.exp_batch(center, V)

    def take(self, X, i):
        return np.array(X[i], dtype=float)

    def stack(self, points):
        return np.array([self.validate(p) for p in points], dtype=float).reshape(-1, self.dim + 1)

    def repeat(self, x, n):
        return np.tile(self.validate(x), (n, 1))

    def batch_len(self, X):
        return len(X)

    def origin(self):
        o = np.zeros(self.dim + 1)
        o[0] = 1.0
        return o

    def ball_grid(self, x, radius, points_per_axis):
        x = self.validate(x)
        offsets, step = axis_grid(self.dim, points_per_axis)
        keep = np.linalg.norm(offsets, axis=1) <= 1.0 + 1e-12
        V = radius * offsets[keep] @ self.tangent_basis(x)
        return np.vstack([x[None, :], self.exp_batch(x, V)]), radius * step

    def neighbors(self, p, h):
        out = []
        for b in self.tangent_basis(p):
            out.append(self.exp(p, h * b))
            out.append(self.exp(p, -h * b))
        return out

    def extend(self, p, q, t):
        return self.exp(p, t * self.log(p, q))

    def point_to_json(self, x):
        return [float(v) for v in self.validate(x)]
