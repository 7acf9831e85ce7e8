"""Command-line interface: ``augustin {solve,gen,bench,check}``.

Exit codes: 0 converged / all probes pass, 1 usage or input error, 2 iteration
budget exhausted, 3 divergence detected.  Diagnostics go to stderr.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from .instances import InstanceFileError, gen_instance, parse_instance, write_instance
from .objective import Order, order1_solution
from .solvers import (CONVERGED, DIVERGED, MAX_ITERS, IterationRecord, SolverConfig,
                      fill_bound_terms, fixed_point_solve, rgd_solve)
from .traces import write_reports, write_summary, write_trace
from .validation import run_invariant_suite

EXIT_OK, EXIT_INPUT, EXIT_MAX_ITERS, EXIT_DIVERGED = 0, 1, 2, 3
STATUS_EXIT = {CONVERGED: EXIT_OK, MAX_ITERS: EXIT_MAX_ITERS, DIVERGED: EXIT_DIVERGED}
SOLVERS = {"rgd": rgd_solve, "fixed-point": fixed_point_solve}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive_alpha(text: str) -> float:
    try:
        return Order(float(text)).alpha
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _alpha_list(text: str) -> list[float]:
    return [_positive_alpha(t) for t in text.split(",") if t.strip()]


def _gen_shape(text: str) -> tuple[int, int]:
    try:
        m, n = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("--gen expects M,N") from None
    if m < 1 or n < 1:
        raise argparse.ArgumentTypeError("M and N must be >= 1")
    return m, n


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="augustin", description="Order-alpha Augustin information by Poincare RGD.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="solve one instance")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--instance", metavar="PATH")
    src.add_argument("--gen", type=_gen_shape, metavar="M,N", help="use a generated instance")
    s.add_argument("--seed", type=int, default=0, help="seed for --gen")
    s.add_argument("--alpha", type=_positive_alpha, required=True)
    s.add_argument("--solver", choices=sorted(SOLVERS), default="rgd")
    s.add_argument("--max-iters", type=int, default=10_000)
    s.add_argument("--tol", type=float, default=1e-10)
    s.add_argument("--trace", metavar="PATH")
    s.add_argument("--trace-every", type=int, default=1)
    s.add_argument("--json", action="store_true", help="print the result as JSON")

    g = sub.add_parser("gen", help="write a random instance file")
    g.add_argument("--m", type=int, default=2**14)
    g.add_argument("--n", type=int, default=2**4)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True, metavar="PATH")

    b = sub.add_parser("bench", help="run several solvers on one generated instance")
    b.add_argument("--alpha", type=_positive_alpha, default=3.0)
    b.add_argument("--m", type=int, default=2**14)
    b.add_argument("--n", type=int, default=2**4)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--solvers", default="rgd,fixed-point")
    b.add_argument("--max-iters", type=int, default=10_000)
    b.add_argument("--trace-every", type=int, default=1)
    b.add_argument("--out", required=True, metavar="DIR")

    c = sub.add_parser("check", help="run the invariant suite")
    c.add_argument("--alphas", type=_alpha_list, default=_alpha_list("0.3,0.5,0.999,1.001,2,3"))
    c.add_argument("--m", type=int, default=32)
    c.add_argument("--n", type=int, default=8)
    c.add_argument("--seed", type=int, default=42)
    c.add_argument("--report", metavar="PATH")
    return p


def _closed_form(inst) -> dict:
    x, value = order1_solution(inst)
    return {"solver": "closed-form", "status": CONVERGED, "iterations": 0,
            "f_value": value, "certificate": None, "normalized_x": x.tolist()}


def _cmd_solve(args) -> int:
    if args.max_iters < 0 or args.trace_every < 1 or not args.tol >= 0:
        raise UsageError("--max-iters must be >= 0, --trace-every >= 1 and --tol >= 0")
    if args.instance is not None:
        inst = parse_instance(args.instance)
    else:
        inst = gen_instance(*args.gen, seed=args.seed)
    if args.alpha == 1.0:
        out = _closed_form(inst)
        if args.trace:
            x = np.asarray(out["normalized_x"])
            write_trace(args.trace, [IterationRecord(1, 1.0 + out["f_value"], out["f_value"], 0.0,
                                                     float(x.min()), 0.0, 0)])
        code = EXIT_OK
    else:
        cfg = SolverConfig(Order(args.alpha), max_iters=args.max_iters, grad_tol=args.tol,
                           trace_every=args.trace_every)
        res = SOLVERS[args.solver](inst, cfg)
        if args.trace:
            write_trace(args.trace, fill_bound_terms(res, res.normalized_x).trace)
        out = {"solver": res.solver, "status": res.status, "iterations": res.iterations,
               "f_value": res.f_value, "certificate": res.certificate,
               "normalized_x": res.normalized_x.tolist()}
        code = STATUS_EXIT[res.status]
    out["alpha"] = args.alpha
    if args.json:
        safe = {k: (str(v) if isinstance(v, float) and not math.isfinite(v) else v)
                for k, v in out.items()}
        print(json.dumps(safe))
    else:
        print(f"f_value: {out['f_value']!r}")
        print(f"status: {out['status']}")
        print(f"iterations: {out['iterations']}")
        if out["certificate"] is not None:
            print(f"certificate: {out['certificate']!r}")
    return code


def _cmd_gen(args) -> int:
    inst = gen_instance(args.m, args.n, args.seed)
    meta = {"generator": "numpy PCG64 standard_exponential, rows normalised",
            "m": str(args.m), "n": str(args.n), "seed": str(args.seed)}
    write_instance(inst, args.out, meta)
    return EXIT_OK


def _cmd_bench(args) -> int:
    names = [s.strip() for s in args.solvers.split(",") if s.strip()]
    unknown = [s for s in names if s not in SOLVERS]
    if unknown or not names:
        raise UsageError(f"unsupported solver(s): {', '.join(unknown) or '(none)'}")
    if args.max_iters < 0 or args.trace_every < 1:
        raise UsageError("--max-iters must be >= 0 and --trace-every >= 1")
    inst = gen_instance(args.m, args.n, args.seed)
    cfg = SolverConfig(Order(args.alpha), max_iters=args.max_iters, trace_every=args.trace_every)
    results = {name: SOLVERS[name](inst, cfg) for name in names}
    # bound terms are measured against the RGD answer when one is available
    ref = results["rgd"].normalized_x if "rgd" in results else None
    os.makedirs(args.out, exist_ok=True)
    for name, res in results.items():
        x_star = ref if ref is not None else res.normalized_x
        write_trace(os.path.join(args.out, f"trace_{name}.csv"), fill_bound_terms(res, x_star).trace)
        print(f"{name}: status={res.status} iterations={res.iterations} f_bar={res.f_value!r}")
    write_summary(os.path.join(args.out, "summary.csv"), list(results.values()))
    meta = {"alpha": args.alpha, "m": args.m, "n": args.n, "seed": args.seed,
            "solvers": names, "max_iters": args.max_iters, "trace_every": args.trace_every,
            "start": "uniform 1/N, shared by all solvers",
            "bound_reference": "rgd normalized_x" if ref is not None else "own normalized_x"}
    with open(os.path.join(args.out, "bench.json"), "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=1, sort_keys=True)
        fh.write("\n")
    return EXIT_OK


def _cmd_check(args) -> int:
    inst = gen_instance(args.m, args.n, args.seed)
    reports = run_invariant_suite(inst, args.alphas, seed=args.seed)
    for r in reports:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name} worst={r.worst_violation:.3g} "
              f"threshold={r.threshold:.3g} samples={r.samples}")
    if args.report:
        write_reports(args.report, reports)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_INPUT


COMMANDS = {"solve": _cmd_solve, "gen": _cmd_gen, "bench": _cmd_bench, "check": _cmd_check}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"augustin: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InstanceFileError, OSError, ValueError) as exc:
        print(f"augustin: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
