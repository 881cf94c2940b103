"""Command-line interface: ``sqprox {check-space,check-function,prox,run,suite}``."""

from __future__ import annotations

import argparse
import json
import sys

from .config import load_config
from .errors import SqproxError
from .harness import INJECTIONS, run_experiment, run_suite
from .objectives import catalog_entry, check_sqc, parse_objective
from .prox import ProxParams, prox
from .spaces import (
    RandomSampler,
    check_cat0,
    check_hyperbolic_axioms,
    check_quasilin,
    parse_point,
    parse_space,
    registered_spaces,
)


def _common():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=42, help="random seed (default 42)")
    p.add_argument("--tol", type=float, default=1e-8, help="violation tolerance (default 1e-8)")
    p.add_argument("--samples", type=int, default=10_000, help="random samples per check (default 10000)")
    return p


def cmd_check_space(args, out):
    descs = args.space or [s.descriptor for s in registered_spaces()]
    ok = True
    print(f"{'space':<40} {'check':<18} {'max violation':>14}  status", file=out)
    for desc in descs:
        space = parse_space(desc)
        reports = [
            check_hyperbolic_axioms(space, RandomSampler(args.seed), args.samples, args.tol),
            check_cat0(space, RandomSampler(args.seed), args.samples, args.tol),
            check_quasilin(space, RandomSampler(args.seed), args.samples, args.tol / 10),
        ]
        for rep in reports:
            ok &= rep.passed
            for c in rep.checks:
                status = "pass" if c.passed else "FAIL"
                print(f"{desc:<40} {c.name:<18} {c.max_violation:>14.3e}  {status}", file=out)
    return 0 if ok else 1


def cmd_check_function(args, out):
    if args.catalog:
        entry = catalog_entry(args.catalog)
        space, f = entry.space, entry.objective
    else:
        if not (args.space and args.objective):
            raise SqproxError("check-function needs --catalog or both --space and --objective")
        space = parse_space(args.space)
        f = parse_objective(space, args.objective)
    if args.gamma is not None:
        f = f.with_gamma(args.gamma)
    rep = check_sqc(f, space, RandomSampler(args.seed), args.samples, args.tol)
    out_d = rep.to_dict()
    out_d.update(objective=f.descriptor, space=space.descriptor, gamma_source=f.gamma_source)
    print(json.dumps(out_d, sort_keys=True), file=out)
    return 0 if rep.passed else 1


def cmd_prox(args, out):
    space = parse_space(args.space)
    f = parse_objective(space, args.objective)
    x = parse_point(space, args.x)
    params = ProxParams(beta=args.beta, coarse_points=args.grid, refine_iters=args.refine)
    res = prox(space, f, params, x)
    print(json.dumps(res.to_dict(space), sort_keys=True), file=out)
    return 0


def cmd_run(args, out):
    cfg = load_config(args.config)
    return run_experiment(cfg, args.out_trace, args.out_cert, inject=args.inject)


def cmd_suite(args, out):
    return run_suite(args.seed, args.samples, args.tol, tuple(args.inject or ()), out=out, threads=args.threads)


def build_parser():
    common = _common()
    parser = argparse.ArgumentParser(
        prog="sqprox",
        description="Proximal point method for strongly quasiconvex functions on Hadamard spaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-space", parents=[common], help="randomized axiom and curvature checks")
    p.add_argument("--space", action="append", help="space descriptor; repeatable (default: all registered)")
    p.set_defaults(func=cmd_check_space)

    p = sub.add_parser("check-function", parents=[common], help="sampled strong-quasiconvexity check")
    p.add_argument("--space")
    p.add_argument("--objective")
    p.add_argument("--catalog", help="name of a built-in (space, objective) pair")
    p.add_argument("--gamma", type=float, help="override the claimed modulus")
    p.set_defaults(func=cmd_check_function)

    p = sub.add_parser("prox", parents=[common], help="evaluate one proximal map")
    p.add_argument("--space", required=True)
    p.add_argument("--objective", required=True)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--x", required=True, help="point literal, e.g. 3 or 1,2 or v3 or 2@0.5")
    p.add_argument("--grid", type=int, default=33, help="coarse points per axis or edge")
    p.add_argument("--refine", type=int, default=60, help="golden-section steps per line search")
    p.set_defaults(func=cmd_prox)

    p = sub.add_parser("run", parents=[common], help="run and certify one PPA experiment")
    p.add_argument("--config", required=True)
    p.add_argument("--out-trace")
    p.add_argument("--out-cert")
    p.add_argument("--inject", choices=["perturbed-trace"], help="corrupt the trace before certifying")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("suite", parents=[common], help="run the bundled invariant suite")
    p.add_argument("--inject", action="append", choices=INJECTIONS, help="add a known-bad fixture; repeatable")
    p.add_argument("--threads", type=int, help="worker threads (default: SQPROX_THREADS or all cores)")
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except (SqproxError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
