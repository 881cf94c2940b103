"""Experiment orchestration: PPA runs with certificates, and the invariant suite."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import SqproxError, UnsupportedSpace
from .objectives import catalog, check_sqc, parse_objective
from .ppa import (
    approx_witness,
    attach_ground_truth,
    certify,
    estimate_ground_truth,
    run_ppa,
)
from .prox import ProxParams, prox, prox_oracle
from .spaces import (
    RandomSampler,
    check_cat0,
    check_hyperbolic_axioms,
    check_quasilin,
    parse_space,
    registered_spaces,
)

TRACE_COLUMNS = ("k", "c_k", "f_xk", "step_dist", "dist_to_star", "fejer_slack")
INJECTIONS = ("broken-geodesic", "cn-plus", "concave", "perturbed-trace")


# -- traces and certificates on disk ------------------------------------------------


def _fmt(v):
    # repr gives the shortest round-trip decimal, which keeps files byte-stable
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def trace_csv(trace):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACE_COLUMNS)
    for row in trace.rows():
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _write_atomic(path, text):
    tmp = f"{path}.tmp{os.getpid()}"
    try:
        with open(tmp, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.remove(tmp)


def certificate_json(cert, cfg=None):
    out = cert.to_dict()
    if cfg is not None:
        out["space"] = cfg.space_descriptor
        out["objective"] = cfg.objective_descriptor
        out["schedule"] = str(cfg.schedule)
    return json.dumps(out, indent=2, sort_keys=True) + "\n"


def perturb_trace(trace, eps_grid, phi_values, seed=0):
    """Corrupt a trace: one iterate past ``phi(eps)`` moved ``>= 2 eps`` away from x*.

    The trace is padded with copies of its last iterate when it is shorter
    than the smallest bound, so the corruption always lands where the
    certificate checks.
    """
    space = trace.space
    j = int(np.argmin(phi_values))
    eps, phi = eps_grid[j], phi_values[j]
    while len(trace.iterates) <= phi:
        trace.iterates.append(trace.iterates[-1])
        trace.f_values.append(trace.f_values[-1])
        trace.c_values.append(trace.c_values[-1] if trace.c_values else 1.0)
        trace.step_dists.append(0.0)
    rng = np.random.default_rng(seed)
    xstar = trace.xstar
    for _ in range(1000):
        cand = space.take(space.sample(rng, 64), 0)
        if space.distance(cand, xstar) >= 2 * eps:
            break
    else:
        raise SqproxError("could not find a point far enough from x* to perturb the trace")
    k = len(trace.iterates) - 1
    trace.iterates[k] = cand
    trace.step_dists[k - 1] = space.distance(trace.iterates[k - 1], cand)
    attach_ground_truth(trace, xstar)
    return trace


@dataclass
class ExperimentResult:
    trace: object
    certificate: object
    exit_code: int


def execute(cfg, inject=None):
    """Run the configured PPA and certify it; no files are touched."""
    space, f = cfg.space, cfg.objective
    params = cfg.inner
    ground = "catalog"
    xstar = None
    if f.known_minimizer is None:
        xstar, _ = estimate_ground_truth(space, f, cfg.x0, cfg.schedule, params, cfg.eps, cfg.max_iter)
        ground = "estimated"
    trace = run_ppa(space, f, cfg.x0, cfg.schedule, params, cfg.eps, cfg.max_iter, xstar=xstar)
    c = cfg.schedule.c_lower
    min_f = None if ground == "catalog" else f.eval(xstar)
    cert = certify(trace, f, cfg.gamma_used, c, cfg.b, cfg.eps_grid, min_f=min_f, ground_truth=ground)
    if inject == "perturbed-trace":
        perturb_trace(trace, cert.epsilon_grid, cert.phi_values, seed=cfg.seed)
        cert = certify(trace, f, cfg.gamma_used, c, cert.b, cfg.eps_grid, min_f=min_f, ground_truth=ground)
    return ExperimentResult(trace, cert, 0 if cert.passed else 1)


def run_experiment(cfg, out_trace=None, out_cert=None, inject=None, stderr=None):
    """Run, certify and write outputs. Returns the exit status."""
    stderr = stderr or sys.stderr
    out_trace = out_trace or cfg.out_trace
    out_cert = out_cert or cfg.out_cert
    try:
        res = execute(cfg, inject)
    except (SqproxError, ArithmeticError) as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    try:
        if out_trace:
            _write_atomic(out_trace, trace_csv(res.trace))
        if out_cert:
            _write_atomic(out_cert, certificate_json(res.certificate, cfg))
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=stderr)
        return 2
    return res.exit_code


# -- prox oracle comparison ------------------------------------------------------------


def oracle_check(entry, rng, pairs=100, density=60, tol=1e-6, params=None):
    """Compare ``prox`` with the grid oracle on random ``(x, beta)``.

    Returns ``(worst, passed)`` where ``worst`` is the largest
    ``|prox - oracle| - oracle resolution`` over all pairs; the comparison
    passes when that stays below ``tol``.
    """
    space, f = entry.space, entry.objective
    params = params or ProxParams()
    worst = -math.inf
    if f.domain_radius is not None:
        X = space.sample_ball(rng, pairs, f.center, f.domain_radius)
    else:
        X = space.sample(rng, pairs)
    betas = rng.uniform(0.1, 2.0, size=pairs)
    for i in range(pairs):
        x, beta = space.take(X, i), float(betas[i])
        got = prox(space, f, params.with_beta(beta), x)
        ref = prox_oracle(space, f, beta, x, density)
        worst = max(worst, abs(got.objective - ref.objective) - ref.resolution)
    return worst, bool(worst <= tol)


def oracle_supported(space):
    try:
        prox_oracle(space, parse_objective(space, "quadratic"), 1.0, space.origin(), 10)
    except UnsupportedSpace:
        return False
    return True


# -- the suite ----------------------------------------------------------------------------


@dataclass
class CheckRow:
    name: str
    samples: int
    worst: float
    passed: bool
    detail: str = ""

    def line(self):
        status = "pass" if self.passed else "FAIL"
        detail = f"  {self.detail}" if self.detail else ""
        return f"{self.name:<44} {self.samples:>8} {self.worst:>12.3e}  {status}{detail}"


def _space_check(desc, kind, seed, n, tol):
    def run():
        space = parse_space(desc)
        if kind == "axioms":
            rep = check_hyperbolic_axioms(space, RandomSampler(seed), n, tol)
        elif kind == "cat0":
            rep = check_cat0(space, RandomSampler(seed), n, tol)
        else:
            rep = check_quasilin(space, RandomSampler(seed), n, tol / 10)
        worst = max(c.max_violation for c in rep.checks)
        detail = "" if rep.passed else "failed " + ", ".join(rep.failed())
        return CheckRow(f"{kind}[{desc}]", n, worst, rep.passed, detail)

    return f"{kind}[{desc}]", run


def _sqc_check(name, space, f, seed, n, tol):
    def run():
        rep = check_sqc(f, space, RandomSampler(seed), n, tol)
        detail = f"gamma={f.gamma:.6g} est={rep.estimated_gamma:.6g}"
        return CheckRow(f"sqc[{name}]", n, rep.min_residual, rep.passed, detail)

    return f"sqc[{name}]", run


def _oracle_check(entry, seed, pairs):
    def run():
        worst, ok = oracle_check(entry, np.random.default_rng(seed), pairs, density=40)
        return CheckRow(f"prox-oracle[{entry.name}]", pairs, worst, ok)

    return f"prox-oracle[{entry.name}]", run


def _ppa_check(entry, inject=None):
    def run():
        from .config import parse_config

        cfg = parse_config(f"catalog = {entry.name}\n")
        res = execute(cfg, inject)
        cert, trace = res.certificate, res.trace
        b = cert.b
        witnesses = [approx_witness(trace.step_dists, b, e) for e in (1.0, 0.1, 0.01)]
        ok = cert.passed and all(w is not None for w in witnesses)
        failed = []
        if not cert.fejer_ok:
            failed.append("fejer")
        if not all(cert.iterate_bound_ok):
            failed.append("iterate-bound")
        if not all(cert.value_bound_ok):
            failed.append("value-bound")
        if any(w is None for w in witnesses):
            failed.append("approx-witness")
        detail = f"steps={trace.steps} " + ("certified" if ok else "failed " + ", ".join(failed))
        worst = cert.worst_fejer_slack if cert.worst_fejer_slack is not None else 0.0
        return CheckRow(f"{label}[{entry.name}]", trace.steps, worst, ok, detail)

    label = "ppa" if inject is None else f"ppa-{inject}"
    return f"{label}[{entry.name}]", run


def build_suite(seed=42, n=10_000, tol=1e-8, inject=(), oracle_pairs=5):
    """Checks in registration order as ``(name, callable)`` pairs."""
    checks = []
    descs = [s.descriptor for s in registered_spaces()]
    if "broken-geodesic" in inject:
        descs.append("broken-euclidean:2")
    if "cn-plus" in inject:
        descs.append("linf:2")
    for desc in descs:
        for kind in ("axioms", "cat0", "quasilin"):
            checks.append(_space_check(desc, kind, seed, n, tol))
    entries = catalog()
    for e in entries:
        checks.append(_sqc_check(e.name, e.space, e.objective, seed, n, tol))
    if "concave" in inject:
        from .spaces import Euclidean

        sp = Euclidean(2)
        checks.append(_sqc_check("negquad-e2", sp, parse_objective(sp, "negquad:R=5"), seed, n, tol))
    for e in entries:
        if oracle_supported(e.space):
            checks.append(_oracle_check(e, seed, oracle_pairs))
    for e in entries:
        checks.append(_ppa_check(e))
    if "perturbed-trace" in inject:
        checks.append(_ppa_check(entries[0], "perturbed-trace"))
    return checks


def thread_count():
    env = os.environ.get("SQPROX_THREADS", "").strip()
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _run_guarded(item):
    name, fn = item
    try:
        return fn()
    except (SqproxError, ArithmeticError, ValueError) as exc:
        return CheckRow(name, 0, math.inf, False, f"error: {exc}")


def run_suite(seed=42, n=10_000, tol=1e-8, inject=(), out=None, threads=None):
    """Run every check, print a summary table, return the exit status."""
    out = out or sys.stdout
    checks = build_suite(seed, n, tol, inject)
    threads = threads or thread_count()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(_run_guarded, checks))
    else:
        rows = [_run_guarded(fn) for fn in checks]
    print(f"{'check':<44} {'samples':>8} {'worst':>12}  status", file=out)
    for row in rows:
        print(row.line(), file=out)
    failed = [r.name for r in rows if not r.passed]
    if failed:
        print(f"FAILED {len(failed)} of {len(rows)}: {', '.join(failed)}", file=out)
        return 1
    print(f"all {len(rows)} checks passed (seed={seed}, samples={n}, tol={tol:g})", file=out)
    return 0


__all__ = [
    "INJECTIONS",
    "TRACE_COLUMNS",
    "build_suite",
    "certificate_json",
    "execute",
    "oracle_check",
    "perturb_trace",
    "run_experiment",
    "run_suite",
    "trace_csv",
]
