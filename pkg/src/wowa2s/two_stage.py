"""Two-stage problem data model, recourse evaluation and instance I/O.

A problem couples a first-stage system (cost c, linear rows over x >= 0
with an optional binary mask) with K scenario blocks (d, A, B, h) meaning
second-stage cost d'y subject to B y = h - A x, y >= 0, plus importance
weights p and nonincreasing preferential weights w.  The recourse value
of scenario k is evaluated through the dual

    max  lambda'(h - A x)   s.t.  lambda'B <= d',

whose optimum and optimal lambda feed optimality cuts and whose unbounded
ray certifies second-stage infeasibility and feeds feasibility cuts.
"""

import json
from dataclasses import dataclass

import numpy as np

from . import lp
from .aggregation import WeightVector, wowa

DUALITY_RTOL = 1e-6


class ProblemError(ValueError):
    """Structurally invalid problem data."""


class ParseError(ValueError):
    """Instance file violates the schema; message carries the location."""


class RecourseUnbounded(RuntimeError):
    """Second-stage cost unbounded below (dual infeasible) for a scenario."""


class InfeasibleFirstStage(RuntimeError):
    """A first-stage point with at least one infeasible scenario."""

    def __init__(self, scenario, ray=None):
        super().__init__(f"scenario {scenario} has no feasible second stage")
        self.scenario = scenario
        self.ray = ray


@dataclass
class Scenario:
    d: np.ndarray      # second-stage costs (n2,)
    A: np.ndarray      # coupling matrix (rows, n1)
    B: np.ndarray      # recourse matrix (rows, n2)
    h: np.ndarray      # right-hand side (rows,)


class TwoStageProblem:
    """Immutable two-stage problem instance."""

    def __init__(self, c, first_stage_rows, binary_mask, scenarios, p, w):
        self.c = np.asarray(c, dtype=float)
        self.n1 = self.c.size
        self.first_stage_rows = [
            (np.asarray(coeffs, dtype=float), rel, float(rhs))
            for coeffs, rel, rhs in first_stage_rows
        ]
        for i, (coeffs, rel, _) in enumerate(self.first_stage_rows):
            if coeffs.shape != (self.n1,):
                raise ProblemError(f"first-stage row {i} has wrong length")
            if rel not in (lp.LE, lp.EQ, lp.GE):
                raise ProblemError(f"first-stage row {i} has relation {rel!r}")
        self.binary_mask = np.asarray(binary_mask, dtype=bool)
        if self.binary_mask.shape != (self.n1,):
            raise ProblemError("binary mask length differs from first-stage size")
        if not scenarios:
            raise ProblemError("at least one scenario is required")
        self.scenarios = []
        n2 = np.asarray(scenarios[0].d).size
        for k, sc in enumerate(scenarios):
            d = np.asarray(sc.d, dtype=float)
            A = np.atleast_2d(np.asarray(sc.A, dtype=float))
            B = np.atleast_2d(np.asarray(sc.B, dtype=float))
            h = np.asarray(sc.h, dtype=float)
            if d.shape != (n2,):
                raise ProblemError(f"scenario {k}: d has length {d.size}, expected {n2}")
            if A.shape != (h.size, self.n1):
                raise ProblemError(f"scenario {k}: A is {A.shape}, expected {(h.size, self.n1)}")
            if B.shape != (h.size, n2):
                raise ProblemError(f"scenario {k}: B is {B.shape}, expected {(h.size, n2)}")
            self.scenarios.append(Scenario(d, A, B, h))
        self.n2 = n2
        self.K = len(scenarios)
        if not isinstance(p, WeightVector):
            p = WeightVector(p, "importance")
        if not isinstance(w, WeightVector):
            w = WeightVector(w, "preferential")
        if p.K != self.K or w.K != self.K:
            raise ProblemError("weight vectors must have one entry per scenario")
        if not w.is_nonincreasing:
            raise ProblemError("preferential weights must be nonincreasing")
        self.p = p
        self.w = w


class RecourseResult:
    """Outcome of one scenario's recourse evaluation at a fixed x.

    status 'finite': value (= d'y = dual optimum) and optimal dual lambda.
    status 'infeasible': ray gamma with gamma'B <= 0 and gamma'(h - A x) > 0.
    basis is an opaque warm-start token for the next evaluation of the same
    scenario.
    """

    def __init__(self, status, value=None, dual=None, ray=None, basis=None):
        self.status = status
        self.value = value
        self.dual = dual
        self.ray = ray
        self.basis = basis


def _dual_model(scenario, x):
    """LP for max lambda'(h - A x) s.t. B'lambda <= d, lambda free."""
    rhs_vec = scenario.h - scenario.A @ x
    model = lp.LpModel("max")
    for i in range(scenario.h.size):
        model.add_var(obj=rhs_vec[i], lb=-lp.INF)
    Bt = scenario.B.T
    for j in range(scenario.d.size):
        model.add_row(Bt[j], lp.LE, scenario.d[j])
    return model, rhs_vec


def eval_recourse(problem, k, x, basis=None):
    """Solve scenario k's recourse dual at first-stage point x.

    Returns a finite RecourseResult with the recourse value and dual
    vector, or an infeasibility certificate ray.  Raises RecourseUnbounded
    when the second-stage cost is unbounded below.
    """
    if not 0 <= k < problem.K:
        raise ProblemError(f"scenario index {k} out of range")
    x = np.asarray(x, dtype=float)
    sc = problem.scenarios[k]
    model, rhs_vec = _dual_model(sc, x)
    out = lp.solve_lp(model, basis=basis)
    if out.status == "optimal":
        return RecourseResult("finite", value=out.objective, dual=out.x,
                              basis=out.basis)
    if out.status == "unbounded":
        return RecourseResult("infeasible", ray=out.ray)
    # dual infeasible: the primal second stage is unbounded below
    raise RecourseUnbounded(
        f"scenario {k}: recourse cost unbounded below (dual infeasible)")


def eval_recourse_all(problem, x, bases=None):
    """Recourse results for every scenario in index order."""
    if bases is None:
        bases = [None] * problem.K
    return [eval_recourse(problem, k, x, basis=bases[k]) for k in range(problem.K)]


def eval_objective(problem, x):
    """c'x + WOWA of the K recourse values at x."""
    x = np.asarray(x, dtype=float)
    values = []
    for k in range(problem.K):
        res = eval_recourse(problem, k, x)
        if res.status != "finite":
            raise InfeasibleFirstStage(k, ray=res.ray)
        values.append(res.value)
    return float(problem.c @ x) + wowa(problem.w, problem.p, np.array(values))


# -- instance files ---------------------------------------------------------

def problem_to_dict(problem):
    return {
        "n1": problem.n1,
        "n2": problem.n2,
        "K": problem.K,
        "c": problem.c.tolist(),
        "first_stage_rows": [
            {"coeffs": coeffs.tolist(), "rel": rel, "rhs": rhs}
            for coeffs, rel, rhs in problem.first_stage_rows
        ],
        "binary_mask": [bool(b) for b in problem.binary_mask],
        "scenarios": [
            {"d": sc.d.tolist(), "A": sc.A.tolist(), "B": sc.B.tolist(),
             "h": sc.h.tolist()}
            for sc in problem.scenarios
        ],
        "p": problem.p.entries.tolist(),
        "w": problem.w.entries.tolist(),
    }


def _require(data, field, where):
    if field not in data:
        raise ParseError(f"{where}: missing field {field!r}")
    return data[field]


def problem_from_dict(data, where="instance"):
    n1 = _require(data, "n1", where)
    n2 = _require(data, "n2", where)
    K = _require(data, "K", where)
    c = _require(data, "c", where)
    if len(c) != n1:
        raise ParseError(f"{where}: c has {len(c)} entries, n1 = {n1}")
    rows = []
    for i, row in enumerate(_require(data, "first_stage_rows", where)):
        loc = f"{where}: first_stage_rows[{i}]"
        coeffs = _require(row, "coeffs", loc)
        rel = _require(row, "rel", loc)
        rhs = _require(row, "rhs", loc)
        if len(coeffs) != n1:
            raise ParseError(f"{loc}: {len(coeffs)} coefficients, n1 = {n1}")
        if rel not in (lp.LE, lp.EQ, lp.GE):
            raise ParseError(f"{loc}: unknown relation {rel!r}")
        rows.append((coeffs, rel, rhs))
    mask = _require(data, "binary_mask", where)
    if len(mask) != n1:
        raise ParseError(f"{where}: binary_mask has {len(mask)} entries, n1 = {n1}")
    raw_scenarios = _require(data, "scenarios", where)
    if len(raw_scenarios) != K:
        raise ParseError(f"{where}: {len(raw_scenarios)} scenarios, K = {K}")
    scenarios = []
    for k, sc in enumerate(raw_scenarios):
        loc = f"{where}: scenarios[{k}]"
        d = _require(sc, "d", loc)
        A = _require(sc, "A", loc)
        B = _require(sc, "B", loc)
        h = _require(sc, "h", loc)
        if len(d) != n2:
            raise ParseError(f"{loc}: d has {len(d)} entries, n2 = {n2}")
        if len(A) != len(h) or len(B) != len(h):
            raise ParseError(f"{loc}: A/B row count differs from h length")
        for r, row in enumerate(A):
            if len(row) != n1:
                raise ParseError(f"{loc}: A row {r} has {len(row)} columns, n1 = {n1}")
        for r, row in enumerate(B):
            if len(row) != n2:
                raise ParseError(f"{loc}: B row {r} has {len(row)} columns, n2 = {n2}")
        scenarios.append(Scenario(np.array(d, dtype=float),
                                  np.array(A, dtype=float),
                                  np.array(B, dtype=float),
                                  np.array(h, dtype=float)))
    p = _require(data, "p", where)
    w = _require(data, "w", where)
    if len(p) != K or len(w) != K:
        raise ParseError(f"{where}: p and w must each have K = {K} entries")
    try:
        problem = TwoStageProblem(c, rows, mask, scenarios, p, w)
    except (ProblemError, ValueError) as exc:
        raise ParseError(f"{where}: {exc}") from exc
    if problem.n2 != n2:
        raise ParseError(f"{where}: declared n2 = {n2}, scenarios have {problem.n2}")
    return problem


def save_instance(problem, path):
    with open(path, "w") as fh:
        json.dump(problem_to_dict(problem), fh, indent=1)
        fh.write("\n")


def load_instance(path):
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: not valid JSON ({exc})") from exc
    return problem_from_dict(data, where=str(path))
