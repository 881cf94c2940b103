"""Run configuration: a flat ``key = value`` text format.

Example::

    # quadratic bowl in the plane
    space = euclidean:2
    objective = quadratic:a=0.5,c=1,1
    x0 = -2,3
    c = 0.7
    inner.refine_iters = 60

Either ``c`` (a constant step) or ``schedule`` is required unless a
``catalog`` entry supplies the defaults. Blank lines and ``#`` comments are
ignored; keys may appear at most once.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

from .errors import InvalidParameter, ParseError, SqproxError
from .objectives import catalog_entry, parse_objective
from .ppa import DEFAULT_EPS_GRID, Schedule, parse_schedule
from .prox import ProxParams
from .spaces import parse_space
from .spaces.registry import parse_point

INNER_KEYS = ("coarse_points", "refine_iters", "tol_inner", "starts", "max_rounds")
KEYS = {
    "catalog", "space", "objective", "x0", "c", "schedule", "gamma", "b", "eps",
    "eps_grid", "max_iter", "seed", "out.trace", "out.cert",
} | {f"inner.{k}" for k in INNER_KEYS}


@dataclass
class RunConfig:
    space_descriptor: str
    objective_descriptor: str
    x0_literal: str
    schedule: Schedule
    space: object = None
    objective: object = None
    x0: object = None
    gamma: float | None = None
    b: float | None = None
    eps: float = 1e-10
    eps_grid: tuple = DEFAULT_EPS_GRID
    max_iter: int = 100_000
    seed: int = 42
    inner: ProxParams = field(default_factory=ProxParams)
    out_trace: str | None = None
    out_cert: str | None = None

    @property
    def gamma_used(self):
        return self.objective.gamma if self.gamma is None else self.gamma


def _read_pairs(text):
    pairs = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in KEYS:
            raise ParseError(f"unknown key {key!r}", lineno)
        if key in pairs:
            raise ParseError(f"duplicate key {key!r} (first set on line {pairs[key][1]})", lineno)
        if not value:
            raise ParseError(f"empty value for {key!r}", lineno)
        pairs[key] = (value, lineno)
    return pairs


def parse_config(text):
    """Parse and fully resolve a run configuration."""
    pairs = _read_pairs(text)
    values = {k: v for k, (v, _) in pairs.items()}

    def line_of(key):
        return pairs[key][1] if key in pairs else None

    def convert(key, fn):
        try:
            return fn(values[key])
        except ParseError as exc:
            if exc.line is not None:
                raise
            raise type(exc)(str(exc), line_of(key)) from None
        except (ValueError, SqproxError) as exc:
            raise ParseError(f"bad value for {key!r}: {exc}", line_of(key)) from None

    if "catalog" in values:
        entry = convert("catalog", catalog_entry)
        values.setdefault("space", entry.space_descriptor)
        values.setdefault("objective", entry.objective_descriptor)
        values.setdefault("x0", entry.x0_literal)
        if "schedule" not in values:
            values.setdefault("c", repr(entry.c))
    for key in ("space", "objective", "x0"):
        if key not in values:
            raise ParseError(f"missing required key {key!r}")
    if "c" in values and "schedule" in values:
        raise ParseError("give either 'c' or 'schedule', not both", line_of("schedule"))
    if "c" not in values and "schedule" not in values:
        raise ParseError("missing step size: set 'c' or 'schedule'")

    space = convert("space", parse_space)
    objective = convert("objective", lambda s: parse_objective(space, s))
    x0 = convert("x0", lambda s: parse_point(space, s))
    if "c" in values:
        schedule = convert("c", lambda s: Schedule.constant(_positive(float(s), "c")))
    else:
        schedule = convert("schedule", parse_schedule)

    cfg = RunConfig(values["space"], values["objective"], values["x0"], schedule, space, objective, x0)
    if "gamma" in values:
        cfg.gamma = convert("gamma", lambda s: _positive(float(s), "gamma"))
    if "b" in values:
        cfg.b = convert("b", lambda s: _positive(float(s), "b"))
    if "eps" in values:
        cfg.eps = convert("eps", lambda s: _positive(float(s), "eps"))
    if "eps_grid" in values:
        cfg.eps_grid = convert(
            "eps_grid", lambda s: tuple(_positive(float(t), "eps_grid") for t in s.split(","))
        )
    if "max_iter" in values:
        cfg.max_iter = convert("max_iter", lambda s: _at_least(int(s), 1, "max_iter"))
    if "seed" in values:
        cfg.seed = convert("seed", int)
    inner = {}
    for k in INNER_KEYS:
        key = f"inner.{k}"
        if key in values:
            inner[k] = convert(key, float if k == "tol_inner" else int)
    if inner:
        try:
            cfg.inner = dataclasses.replace(cfg.inner, **inner)
        except InvalidParameter as exc:
            line = min(line_of(f"inner.{k}") for k in inner)
            raise ParseError(str(exc), line) from None
    cfg.out_trace = values.get("out.trace")
    cfg.out_cert = values.get("out.cert")
    return cfg


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def _positive(v, name):
    if not v > 0:
        raise InvalidParameter(f"{name} must be positive, got {v}")
    return v


def _at_least(v, lo, name):
    if v < lo:
        raise InvalidParameter(f"{name} must be >= {lo}, got {v}")
    return v


__all__ = ["RunConfig", "load_config", "parse_config"]
