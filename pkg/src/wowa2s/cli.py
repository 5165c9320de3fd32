"""Command-line front end: instance generation, solving, benchmarking and
the alpha sweep.

Exit codes: 0 when the solve closed its gap (or a non-solving command
succeeded), 1 when a solver stopped on a limit or infeasibility, 2 on
usage or input errors.  Set WOWA_LOG to error, info or debug for solver
iteration traces.
"""

import argparse
import csv
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import loctrans
from .aggregation import WeightError, WeightVector, exponential_owa_weights
from .benders import solve_benders
from .direct import solve_direct
from .lp import ResourceLimit
from .report import GAP_CLOSED, INFEASIBLE, SolveReport
from .solver_errors import InfeasibleProblem, SolverError
from .subgrad import solve_subgradient
from .two_stage import ParseError, load_instance

DEFAULT_EPSILON = 1e-6
DEFAULT_TIME_LIMIT = 3600.0
DEFAULT_SWEEP = ["riskneutral"] + [f"1e-{k}" for k in range(1, 10)] + ["robust"]

METHODS = {
    "direct": lambda problem, eps, mi, tl, floor: solve_direct(
        problem, time_limit=tl),
    "benders": lambda problem, eps, mi, tl, floor: solve_benders(
        problem, epsilon=eps, max_iter=mi, time_limit=tl, theta_floor=floor),
    "subgradient": lambda problem, eps, mi, tl, floor: solve_subgradient(
        problem, epsilon=eps, max_iter=mi, time_limit=tl, theta_floor=floor),
}

log = logging.getLogger("wowa2s.cli")


class UsageError(Exception):
    pass


def criterion_weights(label, K, probabilities):
    """Preferential/importance pair for a sweep label.

    'riskneutral' (aliases 'uniform', '1'): uniform w with the instance
    probabilities as p, which minimizes expected cost.  'robust': all
    preferential weight on the worst value with uniform p, which minimizes
    the worst-case cost.  A float alpha in (0, 1): exponential weights with
    the instance probabilities.
    """
    if label in ("riskneutral", "uniform", "1"):
        return (WeightVector.uniform(K, "preferential"),
                WeightVector(probabilities, "importance"))
    if label == "robust":
        e1 = np.zeros(K)
        e1[0] = 1.0
        return (WeightVector(e1, "preferential"),
                WeightVector.uniform(K, "importance"))
    try:
        alpha = float(label)
    except ValueError:
        raise UsageError(
            f"weight label {label!r} is neither riskneutral, robust nor a number")
    return (exponential_owa_weights(alpha, K),
            WeightVector(probabilities, "importance"))


def _load_any(path):
    """A loctrans file (returns (instance, None)) or a generic two-stage
    file (returns (None, problem))."""
    if not os.path.exists(path):
        raise UsageError(f"instance file not found: {path}")
    import json
    with open(path) as fh:
        try:
            head = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: not valid JSON ({exc})")
    if "loctrans" in head:
        return loctrans.load_loctrans(path), None
    return None, load_instance(path)


def _solve_once(problem, method, epsilon, max_iter, time_limit, theta_floor):
    return METHODS[method](problem, epsilon, max_iter, time_limit, theta_floor)


def cmd_gen(args):
    if min(args.n, args.m, args.K) < 1:
        raise UsageError("n, m and K must all be at least 1")
    inst = loctrans.generate(args.n, args.m, args.K, args.seed)
    loctrans.save_loctrans(inst, args.out)
    print(f"wrote ({args.n},{args.m},{args.K}) instance with seed {args.seed} "
          f"to {args.out}")
    return 0


def cmd_solve(args):
    inst, problem = _load_any(args.instance)
    if inst is not None:
        label = args.weights if args.weights else str(args.alpha)
        w, p = criterion_weights(label, inst.K, inst.p)
        problem = loctrans.to_two_stage(inst, w, importance=p)
    try:
        report = _solve_once(problem, args.method, args.epsilon, args.max_iter,
                             args.time_limit, args.theta_floor)
    except InfeasibleProblem as exc:
        report = SolveReport(
            method=args.method, objective=None, first_stage=[],
            recourse_values=[], iterations=0, feasibility_cuts=0,
            optimality_cuts=0, wall_time=0.0, master_time=0.0, sub_time=0.0,
            termination=INFEASIBLE)
        if args.out:
            report.save(args.out)
        print(f"infeasible: {exc}", file=sys.stderr)
        return 1
    if args.out:
        report.save(args.out)
    gap = "n/a" if report.gap is None else f"{report.gap:.3e}"
    print(f"method={report.method} objective={report.objective!r} gap={gap} "
          f"termination={report.termination} iterations={report.iterations} "
          f"time={report.wall_time:.2f}s")
    return 0 if report.termination == GAP_CLOSED else 1


def _bench_task(task):
    size, seed, method, epsilon, max_iter, time_limit = task
    n, m, K = size
    inst = loctrans.generate(n, m, K, seed)
    w, p = criterion_weights("0.1", K, inst.p)
    problem = loctrans.to_two_stage(inst, w)
    try:
        report = _solve_once(problem, method, epsilon, max_iter, time_limit,
                             None)
    except (SolverError, ResourceLimit) as exc:
        log.warning("bench (%s seed %d %s): %s", size, seed, method, exc)
        return (n, m, K, method, seed, time_limit, None, None, None, 0)
    solved = 1 if report.termination == GAP_CLOSED else 0
    wall = report.wall_time
    if method == "direct":
        return (n, m, K, method, seed, wall, None, None, None, solved)
    mpct = 100.0 * report.master_time / wall if wall > 0 else 0.0
    spct = 100.0 * report.sub_time / wall if wall > 0 else 0.0
    return (n, m, K, method, seed, wall, report.iterations, mpct, spct, solved)


def _parse_sizes(text):
    sizes = []
    for part in text.split(";"):
        bits = part.strip().split(",")
        if len(bits) != 3:
            raise UsageError(f"size {part!r} is not of the form n,m,K")
        sizes.append(tuple(int(b) for b in bits))
    return sizes


def cmd_bench(args):
    sizes = _parse_sizes(args.sizes)
    methods = [m.strip() for m in args.methods.split(",")]
    for m in methods:
        if m not in METHODS:
            raise UsageError(f"unknown method {m!r}")
    tasks = [(size, seed, method, args.epsilon, args.max_iter, args.time_limit)
             for size in sizes
             for method in methods
             for seed in range(args.instances)]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_bench_task, tasks))
    else:
        rows = [_bench_task(task) for task in tasks]

    def fmt(v, pattern="{:.4f}"):
        return "" if v is None else (pattern.format(v) if isinstance(v, float) else v)

    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "m", "K", "method", "instance_seed", "time_s",
                         "iterations", "master_pct", "sub_pct", "solved"])
        for size in sizes:
            for method in methods:
                group = [r for r in rows
                         if (r[0], r[1], r[2]) == size and r[3] == method]
                group.sort(key=lambda r: r[4])
                for r in group:
                    writer.writerow([r[0], r[1], r[2], r[3], r[4],
                                     fmt(r[5]), fmt(r[6], "{}"),
                                     fmt(r[7], "{:.2f}"), fmt(r[8], "{:.2f}"),
                                     r[9]])
                solved = [r for r in group if r[9] == 1]
                def avg(idx):
                    vals = [r[idx] for r in solved if r[idx] is not None]
                    return sum(vals) / len(vals) if vals else None
                writer.writerow([size[0], size[1], size[2], method, "avg",
                                 fmt(avg(5)), fmt(avg(6), "{:.2f}"),
                                 fmt(avg(7), "{:.2f}"), fmt(avg(8), "{:.2f}"),
                                 f"{len(solved)}/{len(group)}"])
    print(f"wrote benchmark CSV to {args.out}")
    return 0


def cmd_sweep(args):
    inst, problem = _load_any(args.instance)
    if inst is None:
        raise UsageError("sweep needs a loctrans-format instance "
                         "(expected-cost evaluation requires the raw data)")
    labels = ([a.strip() for a in args.alphas.split(",")]
              if args.alphas else list(DEFAULT_SWEEP))
    records = []
    for label in labels:
        w, p = criterion_weights(label, inst.K, inst.p)
        problem = loctrans.to_two_stage(inst, w, importance=p)
        report = _solve_once(problem, args.method, args.epsilon, args.max_iter,
                             args.time_limit, None)
        if report.termination != GAP_CLOSED or report.objective is None:
            log.warning("sweep label %s did not close its gap (%s)", label,
                        report.termination)
            if report.objective is None:
                records.append((label, None, None, None, report.wall_time))
                continue
        fs = np.asarray(report.first_stage)
        z, x = fs[:inst.m], fs[inst.m:]
        ev = loctrans.evaluate_solution(inst, z, x)
        records.append((label, report.objective, ev["expected_cost"],
                        ev["worst_case_cost"], report.wall_time))
        print(f"alpha={label:>12s} objective={report.objective:14.4f} "
              f"expected={ev['expected_cost']:14.4f} "
              f"worst={ev['worst_case_cost']:14.4f}")
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["alpha", "objective", "expected_cost",
                         "worst_case_cost", "time_s"])
        for rec in records:
            writer.writerow(
                [rec[0]]
                + ["" if v is None else f"{v:.6f}" for v in rec[1:4]]
                + [f"{rec[4]:.4f}"])
    print(f"wrote sweep CSV to {args.out}")
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="wowa2s",
        description="Two-stage decision making under the weighted-OWA criterion")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a location-transportation instance")
    g.add_argument("--n", type=int, required=True, help="customer sites")
    g.add_argument("--m", type=int, required=True, help="facility sites")
    g.add_argument("--K", type=int, required=True, help="demand scenarios")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="solve an instance file")
    s.add_argument("instance")
    s.add_argument("--method", choices=sorted(METHODS), default="direct")
    s.add_argument("--alpha", type=float, default=0.1,
                   help="weight decay for loctrans instances (default 0.1)")
    s.add_argument("--weights", choices=["uniform", "riskneutral", "robust"],
                   default=None, help="limit-case criteria overriding --alpha")
    s.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    s.add_argument("--max-iter", type=int, default=2000)
    s.add_argument("--time-limit", type=float, default=DEFAULT_TIME_LIMIT)
    s.add_argument("--theta-floor", type=float, default=None)
    s.add_argument("--out", default=None, help="write the solve report here")
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("bench", help="benchmark methods over generated instances")
    b.add_argument("--sizes", default="5,5,10;10,10,20;10,10,50;20,20,50",
                   help="semicolon-separated n,m,K triples")
    b.add_argument("--instances", type=int, default=3,
                   help="instances per size (seeds 0..instances-1)")
    b.add_argument("--methods", default="direct,benders,subgradient")
    b.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    b.add_argument("--max-iter", type=int, default=2000)
    b.add_argument("--time-limit", type=float, default=DEFAULT_TIME_LIMIT)
    b.add_argument("--jobs", type=int, default=1,
                   help="solve instances concurrently")
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_bench)

    w = sub.add_parser("sweep", help="trade-off sweep over weight criteria")
    w.add_argument("instance")
    w.add_argument("--alphas", default=None,
                   help="comma-separated labels (default riskneutral,1e-1..1e-9,robust)")
    w.add_argument("--method", choices=sorted(METHODS), default="direct")
    w.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    w.add_argument("--max-iter", type=int, default=2000)
    w.add_argument("--time-limit", type=float, default=DEFAULT_TIME_LIMIT)
    w.add_argument("--out", required=True)
    w.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None):
    level = os.environ.get("WOWA_LOG", "error").lower()
    logging.basicConfig(
        level={"error": logging.ERROR, "info": logging.INFO,
               "debug": logging.DEBUG}.get(level, logging.ERROR),
        format="%(levelname)s %(name)s: %(message)s")
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (UsageError, ParseError, WeightError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SolverError, ResourceLimit) as exc:
        print(f"solver stopped: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
