"""Randomized checkers for the hyperbolic-space axioms and CAT(0) inequalities.

Each check draws ``n`` random tuples from the space's sampler and records
the largest violation. Inequalities ``lhs <= rhs`` contribute
``max(0, lhs - rhs) / scale`` and equalities ``|lhs - rhs| / scale`` where
``scale = max(1, magnitudes involved)``. The quasi-linearization algebra is
measured in absolute terms.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from ..errors import InvalidParameter
from .base import RandomSampler


@dataclass
class CheckResult:
    name: str
    samples: int
    max_violation: float
    passed: bool


@dataclass
class AxiomReport:
    checks: list = field(default_factory=list)
    seed: int = 0
    tolerance: float = 1e-8

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def failed(self):
        return [c.name for c in self.checks if not c.passed]

    def add(self, name, violations):
        v = float(np.max(violations)) if len(violations) else 0.0
        if np.isnan(v):
            v = np.inf
        self.checks.append(CheckResult(name, len(violations), v, v <= self.tolerance))

    def to_dict(self):
        return {
            "seed": self.seed,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "checks": [asdict(c) for c in self.checks],
        }


def _scale(*arrays):
    out = np.ones_like(np.asarray(arrays[0], dtype=float))
    for a in arrays:
        out = np.maximum(out, np.abs(a))
    return out


def _ineq(lhs, rhs, *mags):
    return np.maximum(lhs - rhs, 0.0) / _scale(lhs, rhs, *mags)


def _eq(lhs, rhs, *mags):
    return np.abs(lhs - rhs) / _scale(lhs, rhs, *mags)


def _draw(space, sampler, n, k):
    if n < 1:
        raise InvalidParameter("need at least one sample")
    sampler = RandomSampler.coerce(sampler)
    return sampler, [space.sample(sampler.rng, n) for _ in range(k)]


def check_hyperbolic_axioms(space, sampler, n=10_000, tol=1e-8):
    """Sample (W1)-(W4): (W2) and (W3) as equalities, (W1) and (W4) as inequalities."""
    sampler, (X, Y, Z, W) = _draw(space, sampler, n, 4)
    lam = sampler.uniform(n)
    lam2 = sampler.uniform(n)
    d = space.distance_batch
    geo = space.geodesic_batch
    report = AxiomReport(seed=sampler.seed, tolerance=tol)

    G = geo(X, Y, lam)
    dxz, dyz = d(X, Z), d(Y, Z)
    report.add("W1", _ineq(d(G, Z), (1 - lam) * dxz + lam * dyz, dxz, dyz))

    dxy = d(X, Y)
    report.add("W2", _eq(d(G, geo(X, Y, lam2)), np.abs(lam - lam2) * dxy, dxy))

    report.add("W3", _eq(d(G, geo(Y, X, 1.0 - lam)), np.zeros(n), dxy))

    dyw = d(Y, W)
    report.add("W4", _ineq(d(G, geo(Z, W, lam)), (1 - lam) * dxz + lam * dyw, dxz, dyw))
    return report


def check_cat0(space, sampler, n=10_000, tol=1e-8):
    """Sample CN^-, CN^+, the metric Cauchy-Schwarz inequality and the identity
    ``d^2(x,y) = d^2(x,z) + d^2(z,y) + 2 <xz, zy>``."""
    sampler, (X, Y, Z, V) = _draw(space, sampler, n, 4)
    lam = sampler.uniform(n)
    d = space.distance_batch
    geo = space.geodesic_batch
    ql = space.quasilin_batch
    report = AxiomReport(seed=sampler.seed, tolerance=tol)

    dxz2, dyz2, dxy2 = d(X, Z) ** 2, d(Y, Z) ** 2, d(X, Y) ** 2
    mid = geo(X, Y, np.full(n, 0.5))
    report.add(
        "CN-",
        _ineq(d(mid, Z) ** 2, 0.5 * dxz2 + 0.5 * dyz2 - 0.25 * dxy2, dxz2, dyz2, dxy2),
    )
    G = geo(X, Y, lam)
    report.add(
        "CN+",
        _ineq(
            d(G, Z) ** 2,
            (1 - lam) * dxz2 + lam * dyz2 - lam * (1 - lam) * dxy2,
            dxz2, dyz2, dxy2,
        ),
    )
    q = ql(X, Y, Z, V)
    bound = d(X, Y) * d(Z, V)
    report.add("CS", _ineq(q, bound, dxy2, d(Z, V) ** 2))

    dzy2 = d(Z, Y) ** 2
    report.add("quasilin-identity", _eq(dxy2, dxz2 + dzy2 + 2 * ql(X, Z, Z, Y), dxz2, dzy2))
    return report


def check_quasilin(space, sampler, n=10_000, tol=1e-9):
    """Properties (1)-(4) of the quasi-linearization, as absolute errors."""
    sampler, (X, Y, U, V, W) = _draw(space, sampler, n, 5)
    d = space.distance_batch
    ql = space.quasilin_batch
    report = AxiomReport(seed=sampler.seed, tolerance=tol)
    q = ql(X, Y, U, V)
    report.add("quasilin-1", np.abs(ql(X, Y, X, Y) - d(X, Y) ** 2))
    report.add("quasilin-2", np.abs(q - ql(U, V, X, Y)))
    report.add("quasilin-3", np.abs(q + ql(Y, X, U, V)))
    report.add("quasilin-4", np.abs(q + ql(X, Y, V, W) - ql(X, Y, U, W)))
    return report
