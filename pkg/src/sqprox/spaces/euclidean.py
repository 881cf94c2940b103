"""Finite-dimensional Euclidean space with the affine geodesic."""

from __future__ import annotations

import itertools

import numpy as np

from ..errors import InvalidParameter, InvalidPoint
from .base import Space, check_lambda_array

# Coarse/oracle grids are capped at this many points in total.
MAX_GRID_POINTS = 60_000


def axis_grid(dim, points_per_axis, max_points=MAX_GRID_POINTS):
    """Offsets in ``[-1, 1]^dim`` on a regular grid, ordered lexicographically."""
    m = int(points_per_axis)
    while dim > 1 and m > 3 and m**dim > max_points:
        m -= 1
    ticks = np.linspace(-1.0, 1.0, m)
    if dim == 1:
        return ticks[:, None], 2.0 / (m - 1)
    mesh = np.stack(np.meshgrid(*([ticks] * dim), indexing="ij"), axis=-1)
    return mesh.reshape(-1, dim), 2.0 / (m - 1)


class Euclidean(Space):
    kind = "euclidean"

    def __init__(self, dim, sample_scale=1.5):
        dim = int(dim)
        if dim < 1:
            raise InvalidParameter("euclidean dimension must be >= 1")
        self.dim = dim
        self.sample_scale = float(sample_scale)

    @property
    def descriptor(self):
        return f"euclidean:{self.dim}"

    def validate(self, x):
        try:
            arr = np.atleast_1d(np.asarray(x, dtype=float))
        except (TypeError, ValueError) as exc:
            raise InvalidPoint(f"{self.descriptor}: not a coordinate vector: {x!r}") from exc
        if arr.shape != (self.dim,):
            raise InvalidPoint(f"{self.descriptor} expects {self.dim} coordinates, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidPoint("coordinates must be finite")
        return arr

    def distance(self, x, y):
        x, y = self.validate(x), self.validate(y)
        return float(np.linalg.norm(x - y))

    def distance_batch(self, X, Y):
        return np.linalg.norm(np.asarray(X) - np.asarray(Y), axis=-1)

    def geodesic_batch(self, X, Y, lam):
        lam = check_lambda_array(lam)[:, None]
        return (1.0 - lam) * X + lam * Y

    def sample(self, rng, n):
        return self.sample_scale * rng.normal(size=(n, self.dim))

    def sample_ball(self, rng, n, center, radius):
        center = self.validate(center)
        g = rng.normal(size=(n, self.dim))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        r = radius * rng.uniform(size=n) ** (1.0 / self.dim)
        return center + g * r[:, None]

    def take(self, X, i):
        return np.array(X[i], dtype=float)

    def stack(self, points):
        return np.array([self.validate(p) for p in points], dtype=float).reshape(-1, self.dim)

    def batch_len(self, X):
        return len(X)

    def repeat(self, x, n):
        return np.tile(self.validate(x), (n, 1))

    def origin(self):
        return np.zeros(self.dim)

    def ball_grid(self, x, radius, points_per_axis):
        x = self.validate(x)
        offsets, step = axis_grid(self.dim, points_per_axis)
        keep = np.linalg.norm(offsets, axis=1) <= 1.0 + 1e-12
        grid = x + radius * offsets[keep]
        return np.vstack([x[None, :], grid]), radius * step

    def neighbors(self, p, h):
        eye = np.eye(self.dim)
        return [p + s * h * e for e, s in itertools.product(eye, (1.0, -1.0))]

    def extend(self, p, q, t):
        """Point on the line through ``p`` and ``q`` at ``p + t (q - p)``."""
        return p + t * (q - p)

    def point_to_json(self, x):
        return [float(v) for v in self.validate(x)]
