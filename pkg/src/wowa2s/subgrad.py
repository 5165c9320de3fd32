"""Delayed cut generation with a single WOWA epigraph variable.

The master carries only the first stage and one scalar theta bounding the
WOWA of the recourse values from below.  Each optimality pass sorts the
scenarios by decreasing recourse value, turns the interpolant increments
along that ordering into effective weights, and adds the single cut

    theta >= sum_k delta_k * lambda_{pi(k)}'(h_{pi(k)} - A_{pi(k)} x),

which is tight at the generating point and a valid under-estimate
elsewhere (a subgradient-style linearization of the WOWA of the recourse
values).  Feasibility cuts are the same dual-ray cuts as in the
q_k-based solver.
"""

import logging
import time
from dataclasses import dataclass

import numpy as np

from . import lp
from .cuts import (CutPool, add_first_stage, feasibility_cut,
                   first_stage_rows, master_solve, ray_certificate,
                   recourse_floor, relative_gap)
from .report import (GAP_CLOSED, ITER_LIMIT, TIME_LIMIT, IterationRecord,
                     SolveReport)
from .solver_errors import (InfeasibleProblem, InvalidThetaFloor, StalledGap,
                            UnboundedProblem)
from .two_stage import eval_recourse
from .aggregation import ranked_weights, wowa

log = logging.getLogger("wowa2s.subgrad")


@dataclass
class SubgradientCut:
    """Linearization theta >= constant + coeffs'x of the WOWA of the
    recourse values, built at one first-stage point."""

    order: np.ndarray      # scenarios sorted by decreasing recourse value
    weights: np.ndarray    # effective weight per sorted position
    coeffs: np.ndarray     # gradient over x: -sum_k delta_k lambda'A
    constant: float        # sum_k delta_k lambda'h

    def value_at(self, x):
        return float(self.constant + self.coeffs @ x)


def wowa_subgradient(problem, x, recourse):
    """Build the WOWA cut at x from finite recourse results.

    The cut evaluated at x equals the WOWA of the recourse values there;
    at any other recourse-feasible point it is a valid under-estimate.
    """
    if any(res.status != "finite" for res in recourse):
        raise ValueError("all recourse results must be finite to build a cut")
    values = np.array([res.value for res in recourse])
    rw = ranked_weights(problem.w, problem.p, values)
    coeffs = np.zeros(problem.n1)
    constant = 0.0
    for pos, k in enumerate(rw.order):
        sc = problem.scenarios[k]
        lam = recourse[k].dual
        coeffs -= rw.weights[pos] * (lam @ sc.A)
        constant += rw.weights[pos] * float(lam @ sc.h)
    return SubgradientCut(order=rw.order, weights=rw.weights,
                          coeffs=coeffs, constant=constant)


class SubgradMaster:
    """Master over x and one scalar theta with objective c'x + theta."""

    def __init__(self, problem, theta_floor):
        model = lp.LpModel("min")
        add_first_stage(model, problem)
        self.theta_col = model.add_var(obj=1.0, lb=theta_floor)
        first_stage_rows(model, problem)
        self.model = model
        self.problem = problem
        self.n1 = problem.n1
        self.pool = CutPool()
        self.n_feasibility_cuts = 0
        self.n_optimality_cuts = 0

    def add_feasibility_cut(self, k, gamma):
        coeffs, rhs = feasibility_cut(self.problem, k, gamma)
        if not self.pool.add(("feas", k), coeffs, rhs):
            return False
        row = np.zeros(self.model.num_vars)
        row[:self.n1] = coeffs
        self.model.add_row(row, lp.GE, rhs)
        self.n_feasibility_cuts += 1
        return True

    def add_wowa_cut(self, cut):
        # theta - coeffs'x >= constant
        if not self.pool.add(("wowa",), cut.coeffs, cut.constant):
            return False
        row = np.zeros(self.model.num_vars)
        row[:self.n1] = -cut.coeffs
        row[self.theta_col] = 1.0
        self.model.add_row(row, lp.GE, cut.constant)
        self.n_optimality_cuts += 1
        return True

    def solve(self, time_limit=None):
        return master_solve(self.model, time_limit=time_limit)


def solve_subgradient(problem, epsilon=1e-6, max_iter=2000, time_limit=3600.0,
                      theta_floor=None):
    """Run the theta-based delayed cut generation to a relative gap below
    epsilon.  One WOWA cut per optimality iteration; errors as in the
    q_k-based solver, plus InvalidThetaFloor when an upper bound ever dips
    below c'x* + theta_floor, proving the floor invalid."""
    t0 = time.monotonic()
    floor = recourse_floor(problem, theta_floor)
    master = SubgradMaster(problem, floor)
    K = problem.K
    bases = [None] * K
    ub_best = np.inf
    x_best = None
    recourse_best = None
    lb = -np.inf
    gap = np.inf
    trace = []
    master_time = 0.0
    sub_time = 0.0
    termination = ITER_LIMIT
    iteration = 0

    while iteration < max_iter:
        iteration += 1
        remaining = time_limit - (time.monotonic() - t0)
        if remaining <= 0:
            termination = TIME_LIMIT
            iteration -= 1
            break
        tm = time.monotonic()
        out = master.solve(time_limit=remaining)
        master_span = time.monotonic() - tm
        master_time += master_span
        if out.status == "infeasible":
            raise InfeasibleProblem(
                "relaxed master infeasible: no first stage satisfies the "
                "feasibility cuts")
        if out.status == "unbounded":
            raise UnboundedProblem("relaxed master unbounded")
        x = out.x[:problem.n1]
        lb = float(out.objective)

        ts = time.monotonic()
        results = []
        for k in range(K):
            res = eval_recourse(problem, k, x, basis=bases[k])
            if res.basis is not None:
                bases[k] = res.basis
            results.append(res)
        sub_time_iter = time.monotonic() - ts
        sub_time += sub_time_iter

        record = IterationRecord(index=iteration, lb=lb, ub=None,
                                 n_feasibility_cuts=0, n_optimality_cuts=0,
                                 master_time=master_span, sub_time=sub_time_iter)
        new_feas = 0
        for k, res in enumerate(results):
            if res.status == "infeasible":
                if master.add_feasibility_cut(k, res.ray):
                    new_feas += 1
                    record.ray_certificates.append(
                        (k,) + ray_certificate(problem, k, res.ray, x))
        if new_feas:
            record.n_feasibility_cuts = new_feas
            trace.append(record)
            log.info("iter %d: LB=%.6g, %d feasibility cut(s)", iteration, lb, new_feas)
            continue
        if any(res.status == "infeasible" for res in results):
            raise StalledGap(
                "infeasible scenario produced no new feasibility cut",
                lb=lb, iteration=iteration, x=x.tolist())

        values = np.array([res.value for res in results])
        wowa_value = wowa(problem.w, problem.p, values)
        if wowa_value < floor - 1e-6:
            raise InvalidThetaFloor(
                f"WOWA of recourse values {wowa_value:.6g} fell below the "
                f"floor {floor:.6g}; the floor is not a valid lower bound")
        ub = float(problem.c @ x) + wowa_value
        if ub < ub_best:
            ub_best = ub
            x_best = x
            recourse_best = values.tolist()
        gap = relative_gap(ub_best, lb)
        record.ub = ub
        trace.append(record)
        log.info("iter %d: LB=%.6g UB=%.6g gap=%.3g", iteration, lb, ub_best, gap)
        if gap < epsilon:
            termination = GAP_CLOSED
            break

        cut = wowa_subgradient(problem, x, results)
        added = master.add_wowa_cut(cut)
        record.n_optimality_cuts = 1 if added else 0
        if not added:
            raise StalledGap(
                f"gap {gap:.3e} >= epsilon but the WOWA cut is a duplicate",
                lb=lb, ub=ub_best, iteration=iteration, x=x.tolist())
    else:
        termination = ITER_LIMIT

    return SolveReport(
        method="subgradient",
        objective=None if x_best is None else float(ub_best),
        first_stage=None if x_best is None else x_best.tolist(),
        recourse_values=recourse_best or [],
        iterations=iteration,
        feasibility_cuts=master.n_feasibility_cuts,
        optimality_cuts=master.n_optimality_cuts,
        wall_time=time.monotonic() - t0,
        master_time=master_time,
        sub_time=sub_time,
        termination=termination,
        gap=None if not np.isfinite(gap) else float(gap),
        trace=trace,
    )
