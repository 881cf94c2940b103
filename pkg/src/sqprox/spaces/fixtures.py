"""Deliberately defective spaces used to show the checkers catch bugs."""

from __future__ import annotations

import numpy as np

from .base import check_lambda_array
from .euclidean import Euclidean


class LInfPlane(Euclidean):
    """``R^n`` with the max-norm: a hyperbolic space that is not CAT(0)."""

    kind = "linf"
    cat0 = False

    @property
    def descriptor(self):
        return f"linf:{self.dim}"

    def distance(self, x, y):
        x, y = self.validate(x), self.validate(y)
        return float(np.max(np.abs(x - y)))

    def distance_batch(self, X, Y):
        return np.max(np.abs(np.asarray(X) - np.asarray(Y)), axis=-1)


class BrokenGeodesic(Euclidean):
    """Euclidean space whose geodesic drifts by ``offset * lambda`` in x_1."""

    kind = "broken-euclidean"
    cat0 = False

    def __init__(self, dim, offset=1e-3):
        super().__init__(dim)
        self.offset = float(offset)

    @property
    def descriptor(self):
        return f"broken-euclidean:{self.dim}"

    def geodesic_batch(self, X, Y, lam):
        lam = check_lambda_array(lam)
        out = (1.0 - lam)[:, None] * X + lam[:, None] * Y
        out[:, 0] += self.offset * lam
        return out
