"""l2-product of model spaces: ``d^2 = sum_i d_i^2``, geodesics componentwise."""

from __future__ import annotations

import numpy as np

from ..errors import InvalidParameter, InvalidPoint
from .base import Space, check_lambda_array


def _index(X, idx):
    if isinstance(X, tuple) and not hasattr(X, "_fields"):
        return tuple(_index(Xi, idx) for Xi in X)
    if hasattr(X, "_fields"):
        return type(X)(*(f[idx] for f in X))
    return X[idx]


def _concat(batches):
    first = batches[0]
    if isinstance(first, tuple) and not hasattr(first, "_fields"):
        return tuple(_concat(parts) for parts in zip(*batches))
    if hasattr(first, "_fields"):
        return type(first)(*(np.concatenate(parts) for parts in zip(*batches)))
    return np.concatenate(batches)


class Product(Space):
    kind = "product"

    def __init__(self, components):
        components = list(components)
        if not components:
            raise InvalidParameter("a product space needs at least one component")
        self.components = components
        self.cat0 = all(c.cat0 for c in components)

    @property
    def descriptor(self):
        return "product:" + "+".join(c.descriptor for c in self.components)

    def validate(self, x):
        if not isinstance(x, (tuple, list)) or len(x) != len(self.components):
            raise InvalidPoint(
                f"{self.descriptor} expects a tuple of {len(self.components)} component points"
            )
        return tuple(c.validate(xi) for c, xi in zip(self.components, x))

    def distance_batch(self, X, Y):
        sq = sum(c.distance_batch(Xi, Yi) ** 2 for c, Xi, Yi in zip(self.components, X, Y))
        return np.sqrt(sq)

    def geodesic_batch(self, X, Y, lam):
        lam = check_lambda_array(lam)
        return tuple(c.geodesic_batch(Xi, Yi, lam) for c, Xi, Yi in zip(self.components, X, Y))

    def sample(self, rng, n):
        return tuple(c.sample(rng, n) for c in self.components)

    def sample_ball(self, rng, n, center, radius):
        center = self.validate(center)
        kept = []
        have = 0
        for _ in range(1000):
            m = max(4 * n, 64)
            cand = tuple(c.sample_ball(rng, m, ci, radius) for c, ci in zip(self.components, center))
            d = self.distance_batch(cand, self.repeat(center, m))
            idx = np.flatnonzero(d <= radius)
            kept.append(tuple(_index(Ci, idx) for Ci in cand))
            have += len(idx)
            if have >= n:
                break
        return tuple(_index(_concat(parts), slice(0, n)) for parts in zip(*kept))

    def take(self, X, i):
        return tuple(c.take(Xi, i) for c, Xi in zip(self.components, X))

    def stack(self, points):
        pts = [self.validate(p) for p in points]
        return tuple(c.stack([p[k] for p in pts]) for k, c in enumerate(self.components))

    def repeat(self, x, n):
        x = self.validate(x)
        return tuple(c.repeat(xi, n) for c, xi in zip(self.components, x))

    def batch_len(self, X):
        return self.components[0].batch_len(X[0])

    def origin(self):
        return tuple(c.origin() for c in self.components)

    def replace(self, x, k, xk):
        parts = list(x)
        parts[k] = xk
        return tuple(parts)

    def ball_grid(self, x, radius, points_per_axis):
        # one component varies at a time; full product grids grow too fast
        x = self.validate(x)
        pts = [x]
        spacing = 0.0
        for k, c in enumerate(self.components):
            grid, h = c.ball_grid(x[k], radius, points_per_axis)
            spacing = max(spacing, h)
            pts.extend(self.replace(x, k, c.take(grid, i)) for i in range(1, c.batch_len(grid)))
        return self.stack(pts), spacing

    def neighbors(self, p, h):
        out = []
        for k, c in enumerate(self.components):
            out.extend(self.replace(p, k, q) for q in c.neighbors(p[k], h))
        return out

    def point_to_json(self, x):
        x = self.validate(x)
        return [c.point_to_json(xi) for c, xi in zip(self.components, x)]
