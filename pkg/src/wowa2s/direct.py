"""Monolithic linear reformulation of the two-stage WOWA problem.

The WOWA of the scenario costs is linearized through auxiliary variables
beta_j (free) and alpha_kj (>= 0) coupled to the second-stage costs by
beta_j + alpha_kj >= d_k'y_k, with objective weights j*(w_j - w_{j+1}) on
beta_j and K*(w_j - w_{j+1})*p_k on alpha_kj (w_{K+1} = 0).  Minimizing
that block reproduces the WOWA value exactly, so one LP/MIP solves the
whole problem.  The same block over a fixed value vector doubles as an
LP cross-check of the closed-form WOWA (``wowa_lp_value``).
"""

import time
from dataclasses import dataclass

import numpy as np

from . import lp
from .report import SolveReport, GAP_CLOSED
from .two_stage import eval_recourse
from .solver_errors import InfeasibleProblem, UnboundedProblem


def _weight_drops(w):
    """w_j - w_{j+1} with w_{K+1} = 0; nonnegative for nonincreasing w."""
    e = w.entries
    return e - np.append(e[1:], 0.0)


@dataclass
class MonolithModel:
    """Positioned LP/MIP: x columns first, then the K second-stage blocks,
    then beta, then alpha in scenario-major order."""

    model: lp.LpModel
    n1: int
    n2: int
    K: int

    @property
    def x_cols(self):
        return range(self.n1)

    def y_cols(self, k):
        base = self.n1 + k * self.n2
        return range(base, base + self.n2)

    @property
    def beta_cols(self):
        base = self.n1 + self.K * self.n2
        return range(base, base + self.K)

    def alpha_col(self, k, j):
        return self.n1 + self.K * self.n2 + self.K + k * self.K + j


def build_monolith(problem):
    K, n1, n2 = problem.K, problem.n1, problem.n2
    w_drop = _weight_drops(problem.w)
    p = problem.p.entries
    model = lp.LpModel("min")
    for j in range(n1):
        model.add_var(obj=problem.c[j], lb=0.0, binary=bool(problem.binary_mask[j]))
    for _ in range(K):
        for _ in range(n2):
            model.add_var(obj=0.0, lb=0.0)
    for j in range(K):
        model.add_var(obj=(j + 1) * w_drop[j], lb=-lp.INF)
    for k in range(K):
        for j in range(K):
            model.add_var(obj=K * w_drop[j] * p[k], lb=0.0)
    mono = MonolithModel(model, n1, n2, K)

    nv = model.num_vars
    for coeffs, rel, rhs in problem.first_stage_rows:
        row = np.zeros(nv)
        row[:n1] = coeffs
        model.add_row(row, rel, rhs)
    for k, sc in enumerate(problem.scenarios):
        ybase = n1 + k * n2
        for r in range(sc.h.size):
            row = np.zeros(nv)
            row[:n1] = sc.A[r]
            row[ybase:ybase + n2] = sc.B[r]
            model.add_row(row, lp.EQ, sc.h[r])
    for k, sc in enumerate(problem.scenarios):
        ybase = n1 + k * n2
        for j in range(K):
            row = np.zeros(nv)
            row[ybase:ybase + n2] = -sc.d
            row[n1 + K * n2 + j] = 1.0
            row[mono.alpha_col(k, j)] = 1.0
            model.add_row(row, lp.GE, 0.0)
    return mono


def solve_direct(problem, time_limit=None):
    """Solve the monolithic formulation and report the optimum.

    Raises InfeasibleProblem / UnboundedProblem when the monolith has no
    solution; MIP resource exhaustion propagates as lp.ResourceLimit.
    """
    t0 = time.monotonic()
    mono = build_monolith(problem)
    if mono.model.has_binaries:
        out = lp.solve_mip(mono.model, time_limit=time_limit)
    else:
        out = lp.solve_lp(mono.model)
    if out.status == "infeasible":
        raise InfeasibleProblem("monolithic formulation is infeasible")
    if out.status == "unbounded":
        raise UnboundedProblem("monolithic formulation is unbounded")
    x = out.x[:problem.n1]
    recourse = []
    for k in range(problem.K):
        res = eval_recourse(problem, k, x)
        if res.status != "finite":
            raise InfeasibleProblem(
                f"monolith solution leaves scenario {k} infeasible "
                "(numerical inconsistency)")
        recourse.append(res.value)
    wall = time.monotonic() - t0
    return SolveReport(
        method="direct",
        objective=float(out.objective),
        first_stage=x.tolist(),
        recourse_values=recourse,
        iterations=0,
        feasibility_cuts=0,
        optimality_cuts=0,
        wall_time=wall,
        master_time=0.0,
        sub_time=0.0,
        termination=GAP_CLOSED,
        gap=0.0,
    )


def wowa_lp_value(q, w, p, path="dual"):
    """WOWA of a fixed value vector q computed by linear programming.

    path='dual': one LP over (beta, alpha) whose minimum is the WOWA value.
    path='primal': K small LPs, the j-th maximizing q'z over 0 <= z <= p,
    sum z = j/K; the optima are combined with the telescoped weights.
    Both agree with the closed-form wowa() and with each other.
    """
    q = np.asarray(q, dtype=float)
    K = w.K
    if q.shape != (K,) or p.K != K:
        raise ValueError("q, w and p must share length K")
    if not w.is_nonincreasing:
        raise ValueError("LP value requires nonincreasing preferential weights")
    w_drop = _weight_drops(w)
    if path == "dual":
        model = lp.LpModel("min")
        for j in range(K):
            model.add_var(obj=(j + 1) * w_drop[j], lb=-lp.INF)
        for k in range(K):
            for j in range(K):
                model.add_var(obj=K * w_drop[j] * p.entries[k], lb=0.0)
        nv = model.num_vars
        for k in range(K):
            for j in range(K):
                row = np.zeros(nv)
                row[j] = 1.0
                row[K + k * K + j] = 1.0
                model.add_row(row, lp.GE, q[k])
        out = lp.solve_lp(model)
        if out.status != "optimal":
            raise RuntimeError(f"WOWA value LP came back {out.status}")
        return float(out.objective)
    if path == "primal":
        total = 0.0
        for j in range(1, K + 1):
            model = lp.LpModel("max")
            for k in range(K):
                model.add_var(obj=q[k], lb=0.0, ub=p.entries[k])
            model.add_row(np.ones(K), lp.EQ, j / K)
            out = lp.solve_lp(model)
            if out.status != "optimal":
                raise RuntimeError(f"level-{j} LP came back {out.status}")
            total += w_drop[j - 1] * out.objective
        return float(K * total)
    raise ValueError(f"unknown path {path!r}")
