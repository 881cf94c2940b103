"""The proximal point iteration and certificates for its convergence.

``run_ppa`` iterates ``x^{k+1} = Prox_{c_k f}(x^k)`` and records per-step
diagnostics. ``certify`` compares a trace against the explicit iteration
bound ``phi(eps)``, which guarantees ``d(x^k, x*) < eps`` for every
``k >= phi(eps)`` when ``f`` is strongly quasiconvex with modulus ``gamma``,
``inf c_k >= c`` and ``b >= d^2(x^0, x*)``.
"""

from __future__ import annotations

import dataclasses
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from .errors import InvalidParameter, MissingGroundTruth, ParseError, PreconditionViolated
from .prox import ProxParams, prox

#: per-step tolerance on Fejer slacks, absorbing inexact prox solves
FEJER_TOL = 1e-6
#: relative composite descent below which a run counts as stalled
STALL_REL = 1e-14
DEFAULT_EPS_GRID = (1.0, 0.3, 0.1, 0.03, 0.01)


# -- step-size schedules ------------------------------------------------------------


@dataclass(frozen=True)
class Schedule:
    """Step sizes ``c_k``: constant, a cycled list, or uniform draws from ``[c, C]``."""

    kind: str
    values: tuple = ()
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("constant", "list", "random_in"):
            raise InvalidParameter(f"unknown schedule kind {self.kind!r}")
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if not vals:
            raise InvalidParameter("schedule needs at least one value")
        if any(not (math.isfinite(v) and v > 0) for v in vals):
            raise InvalidParameter(f"step sizes must be positive, got {vals}")
        if self.kind == "constant" and len(vals) != 1:
            raise InvalidParameter("constant schedule takes one value")
        if self.kind == "random_in" and (len(vals) != 2 or vals[0] > vals[1]):
            raise InvalidParameter("random_in needs c <= C")

    @classmethod
    def constant(cls, c):
        return cls("constant", (c,))

    @classmethod
    def cycle(cls, values):
        return cls("list", tuple(values))

    @classmethod
    def random_in(cls, c, C, seed=0):
        return cls("random_in", (c, C), int(seed))

    @property
    def c_lower(self):
        return min(self.values)

    def steps(self):
        """Infinite iterator over ``c_0, c_1, ...``."""
        if self.kind == "constant":
            while True:
                yield self.values[0]
        elif self.kind == "list":
            while True:
                yield from self.values
        else:
            rng = np.random.default_rng(self.seed)
            lo, hi = self.values
            while True:
                yield float(rng.uniform(lo, hi))

    def __str__(self):
        if self.kind == "constant":
            return repr(self.values[0])
        if self.kind == "list":
            return "list(" + ",".join(repr(v) for v in self.values) + ")"
        return f"random_in({self.values[0]!r},{self.values[1]!r},seed={self.seed})"


_SCHED = re.compile(r"^\s*(constant|list|random_in)\s*\((.*)\)\s*$")


def parse_schedule(text):
    """``1.0``, ``constant(1)``, ``list(1,0.5)`` or ``random_in(0.5,2,seed=3)``."""
    text = text.strip()
    m = _SCHED.match(text)
    try:
        if m is None:
            return Schedule.constant(float(text))
        kind, body = m.group(1), [t.strip() for t in m.group(2).split(",") if t.strip()]
        if kind == "random_in":
            seed = 0
            nums = []
            for tok in body:
                if tok.startswith("seed="):
                    seed = int(tok[5:])
                else:
                    nums.append(float(tok))
            if len(nums) != 2:
                raise ParseError(f"random_in needs two bounds: {text!r}")
            return Schedule.random_in(nums[0], nums[1], seed)
        return Schedule(kind, tuple(float(t) for t in body))
    except ValueError as exc:
        if isinstance(exc, InvalidParameter):
            raise
        raise ParseError(f"bad schedule {text!r}: {exc}") from None


# -- the iteration ---------------------------------------------------------------------


@dataclass
class PpaTrace:
    space: Any
    iterates: list
    c_values: list
    f_values: list
    step_dists: list
    stop_reason: str
    xstar: Any = None
    dist_to_star: list | None = None
    fejer_slack: list | None = None
    evaluations: int = 0

    @property
    def steps(self):
        return len(self.step_dists)

    def rows(self):
        """Per-iterate rows ``(k, c_k, f_xk, step_dist, dist_to_star, fejer_slack)``."""
        out = []
        for k in range(len(self.iterates)):
            out.append((
                k,
                self.c_values[k] if k < len(self.c_values) else None,
                self.f_values[k],
                self.step_dists[k] if k < len(self.step_dists) else None,
                self.dist_to_star[k] if self.dist_to_star is not None else None,
                self.fejer_slack[k] if self.fejer_slack is not None and k < len(self.fejer_slack) else None,
            ))
        return out


def run_ppa(space, f, x0, schedule, params=None, eps=1e-10, max_iter=100_000, xstar=None):
    """Run the proximal point iteration from ``x0``.

    Stops when ``d(x^k, x^{k+1}) < eps`` (``eps_reached``), after ``max_iter``
    steps, or when the composite descent ``f(x^k) - f(x^{k+1}) -
    d^2(x^k, x^{k+1}) / (2 c_k)`` drops below ``STALL_REL * (f(x^k) - L)``
    (``stalled``).
    """
    if max_iter < 1:
        raise InvalidParameter("max_iter must be >= 1")
    if not (eps > 0):
        raise InvalidParameter("eps must be positive")
    params = params or ProxParams()
    x = space.validate(x0)
    if xstar is None:
        xstar = f.known_minimizer
    iterates, cs, fs, steps = [x], [], [f.eval(x)], []
    evals = 0
    stop = "max_iter"
    gen = schedule.steps()
    for _ in range(max_iter):
        ck = next(gen)
        res = prox(space, f, params.with_beta(ck), x)
        evals += res.evaluations
        y = res.point
        d = space.distance(x, y)
        descent = fs[-1] - res.objective
        iterates.append(y)
        cs.append(ck)
        fs.append(res.value)
        steps.append(d)
        x = y
        if d < eps:
            stop = "eps_reached"
            break
        if descent <= STALL_REL * max(fs[-2] - f.lower_bound, 0.0):
            stop = "stalled"
            break
    trace = PpaTrace(space, iterates, cs, fs, steps, stop, evaluations=evals)
    if xstar is not None:
        attach_ground_truth(trace, xstar)
    return trace


def attach_ground_truth(trace, xstar):
    space = trace.space
    xstar = space.validate(xstar)
    trace.xstar = xstar
    trace.dist_to_star = [space.distance(p, xstar) for p in trace.iterates]
    trace.fejer_slack = fejer_slacks(trace, xstar)
    return trace


def fejer_slacks(trace, xstar):
    """``d^2(x^k,x*) - d^2(x^k,x^{k+1}) - d^2(x^{k+1},x*)`` for every step."""
    space = trace.space
    ds = [space.distance(p, xstar) ** 2 for p in trace.iterates]
    return [ds[k] - trace.step_dists[k] ** 2 - ds[k + 1] for k in range(len(trace.step_dists))]


# -- witnesses and rate bounds ------------------------------------------------------------


def descent_witness(a, b, eps):
    """First ``k <= ceil(b/eps)`` with ``a[k] - a[k+1] < eps``.

    ``a`` must be nonnegative with ``a[0] <= b``; such a ``k`` then always
    exists because the sequence cannot drop by ``eps`` more than ``b/eps`` times.
    """
    if not (eps > 0):
        raise InvalidParameter("eps must be positive")
    a = [float(v) for v in a]
    if not a:
        raise PreconditionViolated("empty sequence")
    if b < a[0]:
        raise PreconditionViolated(f"b = {b} is below a[0] = {a[0]}")
    if min(a) < 0:
        raise PreconditionViolated("sequence must be nonnegative")
    bound = math.ceil(b / eps)
    for k in range(min(bound, len(a) - 2) + 1):
        if a[k] - a[k + 1] < eps:
            return k
    raise PreconditionViolated(f"sequence of length {len(a)} is too short for bound {bound}")


def approx_witness(step_dists, b, eps):
    """First ``k <= ceil(b/eps)`` with ``d^2(x^k, x^{k+1}) < eps``, or ``None``."""
    bound = math.ceil(b / eps)
    for k, d in enumerate(step_dists[: bound + 1]):
        if d * d < eps:
            return k
    return None


def lambda0(gamma, c):
    gc = gamma * c
    return 0.5 * gc / (1.0 + gc)


def rate_phi(gamma, c, b, eps):
    """``ceil(4b / (eps^2 ((1-l0) gamma c - l0)^2)) + 1`` with ``l0 = gamma c / (2 (1 + gamma c))``.

    Evaluated in exact rational arithmetic on the given floats so the
    ceiling is not disturbed by rounding.
    """
    for name, v in (("gamma", gamma), ("c", c), ("b", b), ("eps", eps)):
        if not (math.isfinite(v) and v > 0):
            raise InvalidParameter(f"{name} must be positive and finite, got {v}")
    gc = Fraction(gamma) * Fraction(c)
    l0 = gc / (2 * (1 + gc))
    factor = (1 - l0) * gc - l0
    q = 4 * Fraction(b) / (Fraction(eps) ** 2 * factor**2)
    return math.ceil(q) + 1


def rate_phi_values(gamma, c, b, eps):
    """Index after which ``f(x^k) - min f < eps`` is guaranteed."""
    if not (math.isfinite(eps) and eps > 0):
        raise InvalidParameter(f"eps must be positive and finite, got {eps}")
    return rate_phi(gamma, c, b, math.sqrt(2.0 * c * eps)) + 1


@dataclass
class RateCertificate:
    gamma: float
    c: float
    b: float
    lambda0: float
    epsilon_grid: list
    phi_values: list
    iterate_bound_ok: list
    value_bound_ok: list
    phi_value_indices: list = field(default_factory=list)
    observed_iterate_index: list = field(default_factory=list)
    observed_value_index: list = field(default_factory=list)
    worst_fejer_slack: float | None = None
    fejer_ok: bool = True
    b_source: str = "d2(x0,x*)"
    ground_truth: str = "catalog"
    steps: int = 0
    stop_reason: str = ""

    @property
    def passed(self):
        return all(self.iterate_bound_ok) and all(self.value_bound_ok) and self.fejer_ok

    def to_dict(self):
        out = dataclasses.asdict(self)
        out["passed"] = self.passed
        return out


def _first_index(seq, pred):
    for k, v in enumerate(seq):
        if pred(v):
            return k
    return None


def certify(trace, f, gamma, c, b=None, eps_grid=DEFAULT_EPS_GRID, min_f=None, ground_truth=None):
    """Check a trace against the rate bounds for every ``eps`` in ``eps_grid``.

    For each ``eps`` the iterate bound holds when every in-trace ``k >=
    phi(eps)`` has ``d(x^k, x*) < eps`` and the first index reaching that
    distance is at most ``phi(eps)``; the value bound is the same statement
    for ``f(x^k) - min f`` with index ``phi(sqrt(2 c eps)) + 1``.
    """
    space = trace.space
    xstar = trace.xstar
    source = ground_truth or "catalog"
    if xstar is None:
        xstar = f.known_minimizer
        if xstar is None:
            raise MissingGroundTruth(f"no minimizer known for {f.descriptor!r}")
        attach_ground_truth(trace, xstar)
    if min_f is None:
        min_f = f.known_min if f.known_min is not None else f.eval(xstar)
    d0sq = space.distance(trace.iterates[0], xstar) ** 2
    if b is None:
        b, b_source = d0sq, "d2(x0,x*)"
    else:
        b_source = "user"
        if b < d0sq * (1 - 1e-12):
            raise PreconditionViolated(f"b = {b} is below d^2(x0, x*) = {d0sq}")
    if b <= 0:
        # started at the minimizer; any positive bound is valid
        b, b_source = max(d0sq, 1e-300), "d2(x0,x*) (floored)"
    dist = trace.dist_to_star
    gaps = [v - min_f for v in trace.f_values]
    cert = RateCertificate(
        gamma=float(gamma), c=float(c), b=float(b), lambda0=lambda0(gamma, c),
        epsilon_grid=[float(e) for e in eps_grid], phi_values=[], iterate_bound_ok=[],
        value_bound_ok=[], b_source=b_source, ground_truth=source,
        steps=trace.steps, stop_reason=trace.stop_reason,
    )
    for eps in eps_grid:
        phi = rate_phi(gamma, c, b, eps)
        phv = rate_phi_values(gamma, c, b, eps)
        first_it = _first_index(dist, lambda d, e=eps: d < e)
        first_val = _first_index(gaps, lambda g, e=eps: g < e)
        it_ok = all(d < eps for d in dist[phi:]) and first_it is not None and first_it <= phi
        val_ok = all(g < eps for g in gaps[phv:]) and first_val is not None and first_val <= phv
        cert.phi_values.append(phi)
        cert.phi_value_indices.append(phv)
        cert.observed_iterate_index.append(first_it)
        cert.observed_value_index.append(first_val)
        cert.iterate_bound_ok.append(bool(it_ok))
        cert.value_bound_ok.append(bool(val_ok))
    if trace.fejer_slack:
        cert.worst_fejer_slack = float(min(trace.fejer_slack))
        cert.fejer_ok = cert.worst_fejer_slack >= -FEJER_TOL
    return cert


def estimate_ground_truth(space, f, x0, schedule, params=None, eps=1e-10, max_iter=100_000):
    """Minimizer and minimum estimated by an over-resolved run.

    Inner tolerance and the stopping threshold are tightened and the
    iteration budget raised, each by a factor of 10.
    """
    params = params or ProxParams()
    fine = dataclasses.replace(params, tol_inner=params.tol_inner / 10.0)
    trace = run_ppa(space, f, x0, schedule, fine, eps / 10.0, max_iter * 10, xstar=None)
    xstar = trace.iterates[-1]
    return xstar, f.eval(xstar)


__all__ = [
    "DEFAULT_EPS_GRID",
    "FEJER_TOL",
    "PpaTrace",
    "RateCertificate",
    "Schedule",
    "approx_witness",
    "attach_ground_truth",
    "certify",
    "descent_witness",
    "estimate_ground_truth",
    "fejer_slacks",
    "lambda0",
    "parse_schedule",
    "rate_phi",
    "rate_phi_values",
    "run_ppa",
]
