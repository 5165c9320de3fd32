"""Delayed cut generation with per-scenario value variables.

The master keeps the full WOWA linearization block (beta, alpha and all
K*K coupling rows beta_j + alpha_kj >= q_k) and approximates each
recourse value by a free variable q_k, tightened by per-scenario
optimality cuts q_k >= lambda'(h_k - A_k x) from dual extreme points and
feasibility cuts gamma'(h_k - A_k x) <= 0 from dual extreme rays.  Each
optimality pass adds a cut for every scenario whose q_k underestimates
the true recourse value (multi-cut).
"""

import logging
import time

import numpy as np

from . import lp
from .cuts import (CutPool, add_first_stage, feasibility_cut,
                   first_stage_rows, master_solve, ray_certificate,
                   recourse_floor, relative_gap)
from .direct import _weight_drops
from .report import (GAP_CLOSED, INFEASIBLE, ITER_LIMIT, TIME_LIMIT,
                     IterationRecord, SolveReport)
from .solver_errors import InfeasibleProblem, StalledGap, UnboundedProblem
from .two_stage import eval_recourse
from .aggregation import wowa

log = logging.getLogger("wowa2s.benders")

VIOLATION_TOL = 1e-9


class BendersMaster:
    """Relaxed master: x columns, then q, then beta, then alpha (scenario-
    major).  Coupling rows are permanent; cut rows grow."""

    def __init__(self, problem, q_floor):
        K = problem.K
        w_drop = _weight_drops(problem.w)
        p = problem.p.entries
        model = lp.LpModel("min")
        add_first_stage(model, problem)
        self.q_cols = [model.add_var(obj=0.0, lb=q_floor) for _ in range(K)]
        self.beta_cols = [
            model.add_var(obj=(j + 1) * w_drop[j], lb=-lp.INF) for j in range(K)
        ]
        self.alpha_cols = [
            [model.add_var(obj=K * w_drop[j] * p[k], lb=0.0) for j in range(K)]
            for k in range(K)
        ]
        first_stage_rows(model, problem)
        nv = model.num_vars
        for k in range(K):
            for j in range(K):
                row = np.zeros(nv)
                row[self.beta_cols[j]] = 1.0
                row[self.alpha_cols[k][j]] = 1.0
                row[self.q_cols[k]] = -1.0
                model.add_row(row, lp.GE, 0.0)
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

    def add_optimality_cut(self, k, lam):
        # q_k >= lam'(h_k - A_k x)  ->  q_k + (lam'A_k) x >= lam'h_k
        sc = self.problem.scenarios[k]
        coeffs = lam @ sc.A
        rhs = float(lam @ sc.h)
        if not self.pool.add(("opt", k), coeffs, rhs):
            return False
        row = np.zeros(self.model.num_vars)
        row[:self.n1] = coeffs
        row[self.q_cols[k]] = 1.0
        self.model.add_row(row, lp.GE, rhs)
        self.n_optimality_cuts += 1
        return True

    def solve(self, time_limit=None):
        return master_solve(self.model, time_limit=time_limit)


def solve_benders(problem, epsilon=1e-6, max_iter=500, time_limit=3600.0,
                  theta_floor=None):
    """Run the q_k-based delayed cut generation to a relative gap below
    epsilon.  Returns a SolveReport; raises InfeasibleProblem when the
    accumulated feasibility cuts empty the first stage and StalledGap when
    an iteration makes no progress with the gap still open.

    theta_floor also serves as the lower bound of every q_k; the default
    (None) uses 0 for nonnegative second-stage costs, without which the
    initial relaxed master is unbounded.
    """
    t0 = time.monotonic()
    q_floor = recourse_floor(problem, theta_floor)
    master = BendersMaster(problem, q_floor)
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
        q = out.x[master.q_cols[0]:master.q_cols[0] + K]
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
        ub = float(problem.c @ x) + wowa(problem.w, problem.p, values)
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

        new_opt = 0
        for k, res in enumerate(results):
            if q[k] < res.value - VIOLATION_TOL:
                if master.add_optimality_cut(k, res.dual):
                    new_opt += 1
        record.n_optimality_cuts = new_opt
        if new_opt == 0:
            raise StalledGap(
                f"gap {gap:.3e} >= epsilon but no optimality cut was violated",
                lb=lb, ub=ub_best, iteration=iteration, x=x.tolist())
    else:
        termination = ITER_LIMIT

    return SolveReport(
        method="benders",
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
