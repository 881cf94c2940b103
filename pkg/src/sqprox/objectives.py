"""Strongly quasiconvex objectives, their moduli, and sampled verification.

Every built-in objective is radial: ``f(y) = a * g(d(y, c))`` for a profile
``g`` and a center ``c``. That covers the squared distance, the distance,
its square root and ``max(sqrt(r), r**2 - k)`` on any model space, and it
lets the prox solver hand whole line searches to the compiled kernels.
Arbitrary callables are accepted too and take the generic path.

Moduli for the norm-type profiles are only known on bounded sets. Those
objectives carry a ``domain_radius``; samplers stay inside the ball of that
radius around the center and the claimed modulus is a fitted lower estimate.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from .errors import InvalidParameter, InvalidPoint, NonFiniteObjective, UnknownDescriptor
from .kernels import EUCLID, HYPER, PROFILES
from .spaces import Euclidean, Hyperboloid, Product, RandomSampler
from .spaces.base import check_lambda, check_lambda_array
from .spaces.registry import parse_point

#: log grid used when estimating a modulus from samples
GAMMA_GRID = 2.0 ** (np.arange(-80, 41) / 4.0)

# Moduli fitted with check_sqc (n=10^4, seed 0) on the radius-5 ball and
# rounded down to GAMMA_GRID. Distance and its square root rescale exactly
# with the radius (homogeneity of degree 1 and 1/2).
FITTED_DIST_R5 = 2.0**-2.5
FITTED_SQRT_R5 = 2.0**-4.5
FITTED_MAXCOMBO = {(1.0, 5.0): 2.0**-2.0}


def _g(profile, r, k):
    if profile == "quadratic":
        return r * r
    if profile == "dist":
        return r
    if profile == "sqrtnorm":
        return np.sqrt(r)
    if profile == "maxcombo":
        return np.maximum(np.sqrt(r), r * r - k)
    if profile == "negquad":
        return -r * r
    raise UnknownDescriptor(f"unknown profile {profile!r}")


@dataclass(frozen=True, eq=False)
class Objective:
    """A real function on a space with its claimed strong-quasiconvexity modulus."""

    space: Any
    func: Callable
    gamma: float
    lower_bound: float = 0.0
    known_minimizer: Any = None
    known_min: float | None = None
    descriptor: str = ""
    gamma_source: str = "analytic"
    domain_radius: float | None = None
    center: Any = None
    profile: str | None = None
    weight: float = 1.0
    k: float = 0.0
    parts: tuple | None = None

    @property
    def gamma_claimed(self):
        return self.gamma

    def __call__(self, x):
        return self.eval(x)

    def eval(self, x):
        x = self.space.validate(x)
        val = float(self.func(x))
        if not math.isfinite(val):
            raise NonFiniteObjective(f"{self.descriptor} evaluated to {val} at {x!r}")
        return val

    def eval_batch(self, X):
        if self.profile is not None:
            n = self.space.batch_len(X)
            r = self.space.distance_batch(X, self.space.repeat(self.center, n))
            vals = self.weight * _g(self.profile, r, self.k)
        else:
            vals = np.array([float(self.func(self.space.take(X, i))) for i in range(self.space.batch_len(X))])
        if not np.all(np.isfinite(vals)):
            raise NonFiniteObjective(f"{self.descriptor} produced non-finite values")
        return vals

    def with_gamma(self, gamma, source="user"):
        return dataclasses.replace(self, gamma=float(gamma), gamma_source=source)

    def kernel_spec(self):
        """``(kind, center, profile_id, a, k)`` when the compiled kernels apply."""
        if self.profile is None:
            return None
        if type(self.space) is Euclidean:
            kind = EUCLID
        elif type(self.space) is Hyperboloid:
            kind = HYPER
        else:
            return None
        return kind, np.asarray(self.center, dtype=float), PROFILES[self.profile], self.weight, self.k


def radial(space, profile, center=None, a=1.0, k=0.0, radius=None, gamma=None,
           gamma_source="analytic", descriptor=None):
    """Build ``a * g(d(., center))`` for one of the registered profiles."""
    if profile not in PROFILES:
        raise UnknownDescriptor(f"unknown profile {profile!r}")
    a = float(a)
    if a <= 0:
        raise InvalidParameter("weight a must be positive")
    center = space.origin() if center is None else space.validate(center)
    if radius is not None:
        radius = float(radius)
        if radius <= 0:
            raise InvalidParameter("domain radius must be positive")

    def func(x, _c=center):
        return a * float(_g(profile, space.distance(x, _c), k))

    known_min = 0.0 if profile != "negquad" else None
    lower = 0.0 if profile != "negquad" else (-a * radius**2 if radius else -np.inf)
    return Objective(
        space=space,
        func=func,
        gamma=float(gamma) if gamma is not None else float("nan"),
        lower_bound=lower,
        known_minimizer=center if profile != "negquad" else None,
        known_min=known_min,
        descriptor=descriptor or profile,
        gamma_source=gamma_source,
        domain_radius=radius,
        center=center,
        profile=profile,
        weight=a,
        k=float(k),
    )


def quadratic(space, a=1.0, center=None, descriptor=None):
    """``a * d^2(., c)``: strongly convex, hence strongly quasiconvex with ``gamma = 2a``."""
    f = radial(space, "quadratic", center, a=a, gamma=2.0 * a, descriptor=descriptor)
    if isinstance(space, Product):
        parts = tuple(
            quadratic(comp, a, ci, descriptor=f"{f.descriptor}[{i}]")
            for i, (comp, ci) in enumerate(zip(space.components, f.center))
        )
        f = dataclasses.replace(f, parts=parts)
    return f


def distance_to(space, center=None, radius=5.0, a=1.0, descriptor=None):
    gamma = a * FITTED_DIST_R5 * 5.0 / radius
    return radial(space, "dist", center, a=a, radius=radius, gamma=gamma,
                  gamma_source="fitted", descriptor=descriptor)


def sqrt_norm(space, center=None, radius=5.0, a=1.0, descriptor=None):
    gamma = a * FITTED_SQRT_R5 * (5.0 / radius) ** 1.5
    return radial(space, "sqrtnorm", center, a=a, radius=radius, gamma=gamma,
                  gamma_source="fitted", descriptor=descriptor)


def max_combo(space, k=1.0, center=None, radius=5.0, a=1.0, descriptor=None):
    """``a * max(sqrt(r), r**2 - k)``; the modulus is fitted when not tabulated."""
    f = radial(space, "maxcombo", center, a=a, k=k, radius=radius, gamma=1.0,
               gamma_source="fitted", descriptor=descriptor)
    key = (float(k), float(radius))
    if key in FITTED_MAXCOMBO and a == 1.0:
        gamma = FITTED_MAXCOMBO[key]
    else:
        est = check_sqc(f, space, RandomSampler(0), 10_000, 1e-8).estimated_gamma
        # one grid step of headroom below the sampled estimate
        gamma = est / 2.0**0.25
    return f.with_gamma(gamma, source="fitted")


def concave_quadratic(space, a=1.0, center=None, radius=5.0, gamma=1.0, descriptor=None):
    """``-a d^2(., c)``: a non-example used to show check_sqc rejects it."""
    return radial(space, "negquad", center, a=a, radius=radius, gamma=gamma,
                  gamma_source="user", descriptor=descriptor)


def evaluate(f, x):
    return f.eval(x)


# -- residuals and sampled checks ---------------------------------------------


@dataclass
class SqcReport:
    samples: int
    min_residual: float
    estimated_gamma: float
    passed: bool
    gamma: float
    tolerance: float

    def to_dict(self):
        return dataclasses.asdict(self)


def sqc_residual(f, space, x, y, lam, gamma=None):
    """``max{f(x), f(y)} - lam(1-lam)(gamma/2) d^2(x,y) - f(W(x,y,lam))``."""
    lam = check_lambda(lam)
    gamma = f.gamma if gamma is None else gamma
    z = space.geodesic(x, y, lam)
    d = space.distance(x, y)
    return max(f.eval(x), f.eval(y)) - lam * (1 - lam) * 0.5 * gamma * d * d - f.eval(z)


def _sample_domain(f, space, rng, n):
    if f.domain_radius is not None:
        return space.sample_ball(rng, n, f.center, f.domain_radius)
    return space.sample(rng, n)


def sqc_terms(f, space, X, Y, lam):
    """Per-sample ``(max f - f(z), lam(1-lam) d^2 / 2)`` for batches."""
    lam = check_lambda_array(lam)
    Z = space.geodesic_batch(X, Y, lam)
    fx, fy, fz = f.eval_batch(X), f.eval_batch(Y), f.eval_batch(Z)
    d2 = space.distance_batch(X, Y) ** 2
    return np.maximum(fx, fy) - fz, lam * (1 - lam) * 0.5 * d2


def estimate_gamma(gap, weight, tol):
    """Largest grid value ``g`` with ``gap - g * weight >= -tol`` for all samples."""
    pos = weight > 0
    if np.any(gap[~pos] < -tol):
        return 0.0
    if not pos.any():
        return float(GAMMA_GRID[-1])
    bound = np.min((gap[pos] + tol) / weight[pos])
    ok = GAMMA_GRID[GAMMA_GRID <= bound]
    return float(ok[-1]) if len(ok) else 0.0


def check_sqc(f, space, sampler, n=10_000, tol=1e-8, gamma=None):
    if n < 1:
        raise InvalidParameter("need at least one sample")
    sampler = RandomSampler.coerce(sampler)
    gamma = f.gamma if gamma is None else gamma
    X = _sample_domain(f, space, sampler.rng, n)
    Y = _sample_domain(f, space, sampler.rng, n)
    lam = sampler.uniform(n)
    gap, weight = sqc_terms(f, space, X, Y, lam)
    res = gap - gamma * weight
    mn = float(np.min(res))
    return SqcReport(
        samples=n,
        min_residual=mn,
        estimated_gamma=estimate_gamma(gap, weight, tol),
        passed=bool(mn >= -tol),
        gamma=float(gamma),
        tolerance=tol,
    )


# -- descriptors ----------------------------------------------------------------

OBJECTIVE_KINDS = ("quadratic", "dist", "sqrtnorm", "maxcombo", "negquad")


def _split_params(text):
    params = {}
    last = None
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        if "=" in tok:
            key, _, val = tok.partition("=")
            key = key.strip()
            if key in params:
                raise UnknownDescriptor(f"duplicate parameter {key!r}")
            params[key] = val.strip()
            last = key
        elif last is None:
            raise UnknownDescriptor(f"parameter without a name: {tok!r}")
        else:
            params[last] += "," + tok
    return params


def parse_objective(space, text):
    """Objective from a descriptor such as ``quadratic:a=0.5,c=1,1`` or ``maxcombo:k=1,R=5``.

    Recognised parameters: ``a`` weight, ``c`` center (a point literal),
    ``R`` domain radius, ``k`` (maxcombo only), ``gamma`` override.
    """
    text = text.strip()
    kind, _, rest = text.partition(":")
    kind = kind.strip()
    if kind not in OBJECTIVE_KINDS:
        raise UnknownDescriptor(f"unknown objective {kind!r} (choose from {', '.join(OBJECTIVE_KINDS)})")
    params = _split_params(rest)
    allowed = {"a", "c", "R", "k", "gamma"}
    unknown = set(params) - allowed
    if unknown:
        raise UnknownDescriptor(f"unknown objective parameter(s) {sorted(unknown)} in {text!r}")
    try:
        a = float(params.get("a", 1.0))
        radius = float(params.get("R", 5.0))
        k = float(params.get("k", 1.0))
        gamma = float(params["gamma"]) if "gamma" in params else None
    except ValueError as exc:
        raise UnknownDescriptor(f"bad number in {text!r}: {exc}") from None
    try:
        center = parse_point(space, params["c"]) if "c" in params else None
    except InvalidPoint as exc:
        raise UnknownDescriptor(f"bad center in {text!r}: {exc}") from None
    if kind == "quadratic":
        f = quadratic(space, a, center, descriptor=text)
    elif kind == "dist":
        f = distance_to(space, center, radius, a, descriptor=text)
    elif kind == "sqrtnorm":
        f = sqrt_norm(space, center, radius, a, descriptor=text)
    elif kind == "maxcombo":
        f = max_combo(space, k, center, radius, a, descriptor=text)
    else:
        f = concave_quadratic(space, a, center, radius, descriptor=text)
    if gamma is not None:
        f = f.with_gamma(gamma)
    return f


# -- catalog ------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CatalogEntry:
    """A built-in (space, objective) pair with a default PPA start and step."""

    name: str
    space: Any
    objective: Objective
    x0: Any
    c: float
    space_descriptor: str
    objective_descriptor: str
    x0_literal: str

    def __iter__(self):
        return iter((self.space, self.objective))


_CATALOG = [
    ("quadratic-e1", "euclidean:1", "quadratic:a=1,c=0", "1", 1.0),
    ("dist-e1", "euclidean:1", "dist:c=0,R=5", "3.5", 1.0),
    ("quadratic-e2", "euclidean:2", "quadratic:a=0.5,c=1,1", "-2,3", 0.7),
    ("dist-e2", "euclidean:2", "dist:c=0,0,R=5", "3,-2", 0.5),
    ("sqrtnorm-e2", "euclidean:2", "sqrtnorm:R=5", "-2.5,2", 1.0),
    ("maxcombo-e2", "euclidean:2", "maxcombo:k=1,R=5", "2,3", 0.5),
    ("quadratic-e3", "euclidean:3", "quadratic:a=1,c=0.5,-1,2", "2,1,-1", 0.3),
    ("quadratic-h2", "hyperboloid:2", "quadratic:a=0.5,c=0.3,-0.2", "1.5,1", 1.0),
    ("quadratic-path3", "tree:path3", "quadratic:a=1,c=v1", "v2", 0.5),
    ("quadratic-spider", "tree:spider", "quadratic:a=0.5,c=3@1.0", "v6", 1.0),
    ("dist-spider", "tree:spider", "dist:c=v0,R=4", "v4", 0.8),
    ("quadratic-product", "product:euclidean:1+hyperboloid:2", "quadratic:a=1,c=0.5;-0.4,0.2", "-1;1,1", 0.8),
]


def catalog():
    """The built-in suite of (space, objective) pairs, in a fixed order."""
    from .spaces import parse_space

    out = []
    for name, sdesc, fdesc, x0, c in _CATALOG:
        space = parse_space(sdesc)
        f = parse_objective(space, fdesc)
        out.append(CatalogEntry(name, space, f, parse_point(space, x0), c, sdesc, fdesc, x0))
    return out


def catalog_entry(name):
    for entry in catalog():
        if entry.name == name:
            return entry
    raise UnknownDescriptor(f"no catalog entry named {name!r}")


__all__ = [
    "CatalogEntry",
    "Objective",
    "SqcReport",
    "catalog",
    "catalog_entry",
    "check_sqc",
    "concave_quadratic",
    "distance_to",
    "evaluate",
    "max_combo",
    "parse_objective",
    "quadratic",
    "radial",
    "sqc_residual",
    "sqrt_norm",
]
