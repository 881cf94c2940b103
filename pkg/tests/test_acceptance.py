"""Acceptance criteria 1-10, each printed as a single PASS/FAIL line."""

import io
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from sqprox.cli import main
from sqprox.harness import oracle_check
from sqprox.objectives import catalog
from sqprox.ppa import Schedule, approx_witness, certify, rate_phi, run_ppa
from sqprox.prox import ProxParams, fixed_point_gap
from sqprox.spaces import (
    Euclidean,
    RandomSampler,
    check_cat0,
    check_hyperbolic_axioms,
    check_quasilin,
    parse_space,
)

ACCEPTANCE_SPACES = [
    "euclidean:1",
    "euclidean:2",
    "euclidean:3",
    "hyperboloid:2",
    "tree:path3",
    "tree:spider",
    "product:euclidean:1+hyperboloid:2",
]


@pytest.fixture
def report(capsys):
    def emit(n, ok, text):
        with capsys.disabled():
            print(f"\n[criterion {n:>2}] {'PASS' if ok else 'FAIL'}  {text}")

    return emit


@pytest.fixture(scope="module")
def runs():
    out = []
    for e in catalog():
        tr = run_ppa(e.space, e.objective, e.x0, Schedule.constant(e.c))
        out.append((e, tr))
    return out


def test_criterion_01_space_axioms(report):
    t0 = time.perf_counter()
    worst, failed = 0.0, []
    for desc in ACCEPTANCE_SPACES:
        space = parse_space(desc)
        for check in (check_hyperbolic_axioms, check_cat0):
            rep = check(space, RandomSampler(42), 10_000, 1e-8)
            worst = max(worst, max(c.max_violation for c in rep.checks))
            failed += [f"{desc}:{n}" for n in rep.failed()]
    elapsed = time.perf_counter() - t0
    ok = not failed and elapsed < 10.0
    report(1, ok, f"W1-W4, CN-, CN+, CS, identity on {len(ACCEPTANCE_SPACES)} spaces x 1e4: "
                  f"worst {worst:.2e} <= 1e-8, {elapsed:.2f}s < 10s {failed or ''}")
    assert ok


def test_criterion_02_quasilin_algebra(report):
    worst, failed = 0.0, []
    for desc in ACCEPTANCE_SPACES:
        rep = check_quasilin(parse_space(desc), RandomSampler(42), 10_000, 1e-9)
        worst = max(worst, max(c.max_violation for c in rep.checks))
        failed += [f"{desc}:{n}" for n in rep.failed()]
    ok = not failed
    report(2, ok, f"quasi-linearization properties (1)-(4) on 1e4 samples per space: worst {worst:.2e} <= 1e-9")
    assert ok


def test_criterion_03_prox_oracle(report):
    t0 = time.perf_counter()
    entries = [
        e for e in catalog()
        if (e.space.kind == "euclidean" and e.space.dim <= 2) or e.space.kind in ("hyperboloid", "tree")
    ]
    worst, bad = -math.inf, []
    for i, e in enumerate(entries):
        w, ok = oracle_check(e, np.random.default_rng(1000 + i), pairs=100, density=40, tol=1e-6)
        worst = max(worst, w)
        if not ok:
            bad.append(e.name)
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 30.0
    report(3, ok, f"prox vs grid oracle on {len(entries)} entries x 100 (x, beta): "
                  f"max(|diff| - resolution) = {worst:.2e} <= 1e-6, {elapsed:.1f}s < 30s {bad or ''}")
    assert ok


def test_criterion_04_closed_form_ppa(report):
    E = Euclidean(1)
    f = catalog()[0].objective
    assert f.descriptor == "quadratic:a=1,c=0"
    tr = run_ppa(E, f, [1.0], Schedule.constant(1.0), eps=1e-300, max_iter=20)
    xs = [float(p[0]) for p in tr.iterates]
    err = max(abs(x - 3.0**-k) for k, x in enumerate(xs))
    ratio_err = max(abs(xs[k + 1] / xs[k] - 1.0 / 3.0) for k in range(20))
    ok = len(xs) == 21 and err <= 1e-8 and ratio_err <= 1e-8
    report(4, ok, f"R^1 y^2, c=1, x0=1: max|x^k - 3^-k| = {err:.2e}, decay factor error {ratio_err:.2e} (k <= 20)")
    assert ok


def test_criterion_05_fejer(report, runs):
    worst = min(min(tr.fejer_slack) for _, tr in runs)
    kinds = {e.space.kind for e, _ in runs}
    ok = worst >= -1e-6 and len(runs) >= 8 and {"euclidean", "hyperboloid", "tree", "product"} <= kinds
    report(5, ok, f"Fejer slack over {len(runs)} catalog runs ({', '.join(sorted(kinds))}): min {worst:.2e} >= -1e-6")
    assert ok


def test_criterion_06_approx_witness(report, runs):
    missing = []
    for e, tr in runs:
        b = tr.dist_to_star[0] ** 2
        for eps in (1.0, 0.1, 0.01):
            k = approx_witness(tr.step_dists, b, eps)
            if k is None or k > math.ceil(b / eps):
                missing.append(f"{e.name}@{eps}")
    ok = not missing
    report(6, ok, f"small-step witness k <= ceil(b/eps) for eps in (1, 0.1, 0.01) on {len(runs)} runs {missing or ''}")
    assert ok


def test_criterion_07_rate_certificate(report, runs):
    grid = (1.0, 0.3, 0.1, 0.03, 0.01)
    bad = []
    for e, tr in runs:
        cert = certify(tr, e.objective, e.objective.gamma, e.c, None, grid)
        if not (all(cert.iterate_bound_ok) and all(cert.value_bound_ok)):
            bad.append(e.name)
    phi = rate_phi(1, 1, 4, 0.1)
    ok = not bad and phi == 6401
    report(7, ok, f"iterate and value bounds on eps grid {grid} for {len(runs)} runs {bad or ''}; "
                  f"rate_phi(1,1,4,0.1) = {phi}")
    assert ok


def test_criterion_08_fixed_points(report):
    params = ProxParams()
    worst_at_star, smallest_off, bad = 0.0, math.inf, []
    for i, e in enumerate(catalog()):
        space, f = e.space, e.objective
        g0 = fixed_point_gap(space, f, params, f.known_minimizer)
        worst_at_star = max(worst_at_star, g0)
        rng = np.random.default_rng(2000 + i)
        pts = []
        while len(pts) < 100:
            if f.domain_radius is not None:
                Y = space.sample_ball(rng, 200, f.center, f.domain_radius)
            else:
                Y = space.sample(rng, 200)
            d = space.distance_batch(Y, space.repeat(f.known_minimizer, 200))
            pts += [space.take(Y, j) for j in np.flatnonzero(d > 1e-2)]
        gaps = [fixed_point_gap(space, f, params, y) for y in pts[:100]]
        smallest_off = min(smallest_off, min(gaps))
        if g0 > 1e-6 or min(gaps) <= 1e-4:
            bad.append(e.name)
    ok = not bad
    report(8, ok, f"gap at x* max {worst_at_star:.1e} <= 1e-6; gap at 100 non-minimizers per entry "
                  f"min {smallest_off:.2e} > 1e-4 {bad or ''}")
    assert ok


def _exit(argv):
    return main(argv, io.StringIO())


def test_criterion_09_mutations(report, tmp_path):
    cfg = tmp_path / "quad.cfg"
    cfg.write_text("catalog = quadratic-e1\n")
    codes = {
        "broken geodesic": _exit(["check-space", "--space", "broken-euclidean:2"]),
        "concave objective": _exit(["check-function", "--space", "euclidean:2", "--objective", "negquad:R=5"]),
        "perturbed trace": _exit(["run", "--config", str(cfg), "--inject", "perturbed-trace"]),
    }
    ok = all(c != 0 for c in codes.values())
    report(9, ok, "mutation fixtures caught with nonzero exit: " + ", ".join(f"{k}={v}" for k, v in codes.items()))
    assert ok


def test_criterion_10_suite(report):
    t0 = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "sqprox", "suite"], capture_output=True, text=True)
    elapsed = time.perf_counter() - t0
    ok = proc.returncode == 0 and elapsed < 60.0
    tail = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr[-200:]
    report(10, ok, f"full suite exit {proc.returncode} in {elapsed:.1f}s < 60s ({tail})")
    assert ok
