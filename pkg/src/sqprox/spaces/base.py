"""Abstract geodesic-space interface.

Every model space works on two representations: a single *point* (whatever
object is natural for the model) and a *batch* of points used by the
vectorized checkers and grid searches. Subclasses implement the batch
primitives; the single-point methods are derived from them unless a model
has something cheaper.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import InvalidParameter


def check_lambda(lam):
    lam = float(lam)
    if not (0.0 <= lam <= 1.0) or math.isnan(lam):
        raise InvalidParameter(f"geodesic parameter must lie in [0, 1], got {lam!r}")
    return lam


def check_lambda_array(lam):
    lam = np.asarray(lam, dtype=float)
    if np.any(~((lam >= 0.0) & (lam <= 1.0))):
        raise InvalidParameter("geodesic parameters must lie in [0, 1]")
    return lam


class RandomSampler:
    """Seeded source of randomness shared by samplers and checkers."""

    def __init__(self, seed=42):
        self.seed = int(seed)
        self.rng = np.random.default_rng(self.seed)

    @classmethod
    def coerce(cls, sampler):
        if isinstance(sampler, cls):
            return sampler
        if isinstance(sampler, np.random.Generator):
            obj = cls.__new__(cls)
            obj.seed = -1
            obj.rng = sampler
            return obj
        return cls(sampler)

    def uniform(self, n, low=0.0, high=1.0):
        return self.rng.uniform(low, high, size=n)

    def __repr__(self):
        return f"RandomSampler(seed={self.seed})"


class Space:
    """A uniquely geodesic metric space ``(X, d, W)``.

    Subclasses must provide ``validate``, ``distance_batch``,
    ``geodesic_batch``, ``sample``, ``sample_ball``, ``take``, ``stack``,
    ``batch_len``, ``origin`` and the prox search helpers ``ball_grid`` and
    ``neighbors``.
    """

    kind = "abstract"
    #: True when the space is known to satisfy CN^- (mutation fixtures set False)
    cat0 = True

    # -- single point API -------------------------------------------------
    def validate(self, x):
        raise NotImplementedError

    def distance(self, x, y):
        x, y = self.validate(x), self.validate(y)
        return float(self.distance_batch(self.stack([x]), self.stack([y]))[0])

    def geodesic(self, x, y, lam):
        lam = check_lambda(lam)
        x, y = self.validate(x), self.validate(y)
        out = self.geodesic_batch(self.stack([x]), self.stack([y]), np.array([lam]))
        return self.take(out, 0)

    def quasilin(self, x, y, u, v):
        """Quasi-linearization ``<xy, uv>`` computed from squared distances."""
        d = self.distance
        return 0.5 * (d(x, v) ** 2 + d(y, u) ** 2 - d(x, u) ** 2 - d(y, v) ** 2)

    def same_point(self, x, y, tol=0.0):
        return self.distance(x, y) <= tol

    # -- batch API ----------------------------------------------------------
    def distance_batch(self, X, Y):
        raise NotImplementedError

    def geodesic_batch(self, X, Y, lam):
        raise NotImplementedError

    def quasilin_batch(self, X, Y, U, V):
        d = self.distance_batch
        return 0.5 * (d(X, V) ** 2 + d(Y, U) ** 2 - d(X, U) ** 2 - d(Y, V) ** 2)

    def sample(self, rng, n):
        raise NotImplementedError

    def sample_ball(self, rng, n, center, radius):
        raise NotImplementedError

    def take(self, X, i):
        raise NotImplementedError

    def stack(self, points):
        raise NotImplementedError

    def batch_len(self, X):
        raise NotImplementedError

    def repeat(self, x, n):
        return self.stack([x] * n)

    def origin(self):
        raise NotImplementedError

    # -- prox search helpers -------------------------------------------------
    def ball_grid(self, x, radius, points_per_axis):
        """Deterministic grid covering the closed ball ``B(x, radius)``.

        Returns ``(batch, spacing)``; the first element of the batch is
        ``x`` itself.
        """
        raise NotImplementedError

    def neighbors(self, p, h):
        """Points at distance ``h`` from ``p`` in each principal direction."""
        raise NotImplementedError

    def point_to_json(self, x):
        raise NotImplementedError

    def __repr__(self):
        return f"<{type(self).__name__} {self.descriptor}>"
