"""Machinery shared by the two delayed cut-generation solvers: master
scaffolding over the first stage, feasibility-cut construction from dual
rays, duplicate-cut detection, recourse floors, and the gap formula."""

import numpy as np

from . import lp


class CutPool:
    """Detects exact re-addition of a cut (same tag and coefficients,
    compared after rounding away sub-1e-12 noise)."""

    def __init__(self):
        self._seen = set()

    def add(self, tag, coeffs, rhs):
        key = (tag, np.round(np.asarray(coeffs), 12).tobytes(), round(rhs, 12))
        if key in self._seen:
            return False
        self._seen.add(key)
        return True


def add_first_stage(model, problem, extra_cols=0):
    """Add the x variables (with costs, bounds and binary mask) and the
    first-stage rows, padded with extra_cols trailing zero columns that the
    caller has already created."""
    for j in range(problem.n1):
        model.add_var(obj=problem.c[j], lb=0.0,
                      binary=bool(problem.binary_mask[j]))


def first_stage_rows(model, problem):
    nv = model.num_vars
    for coeffs, rel, rhs in problem.first_stage_rows:
        row = np.zeros(nv)
        row[:problem.n1] = coeffs
        model.add_row(row, rel, rhs)


def feasibility_cut(problem, k, gamma):
    """Coefficients of gamma'(h_k - A_k x) <= 0 rewritten as
    (gamma'A_k) x >= gamma'h_k; returns (coeffs over x, rhs)."""
    sc = problem.scenarios[k]
    return gamma @ sc.A, float(gamma @ sc.h)


def ray_certificate(problem, k, gamma, x):
    """(gamma'(h - A x), max entry of gamma'B): the first must be positive
    and the second nonpositive (within tolerance) for a valid ray."""
    sc = problem.scenarios[k]
    return (float(gamma @ (sc.h - sc.A @ x)), float(np.max(gamma @ sc.B)))


def recourse_floor(problem, theta_floor):
    """A valid lower bound on every recourse value (hence on their WOWA).

    Defaults to 0, valid whenever all second-stage costs are nonnegative;
    instances with negative costs are refused without an explicit floor,
    since the initial master would otherwise be unbounded.
    """
    if theta_floor is not None:
        return float(theta_floor)
    if all(np.all(sc.d >= 0.0) for sc in problem.scenarios):
        return 0.0
    raise ValueError(
        "second-stage costs are negative somewhere; supply an explicit "
        "theta_floor that lower-bounds the recourse values")


def relative_gap(ub, lb):
    """(UB - LB)/|UB|, degrading to the absolute gap when UB is near 0."""
    if abs(ub) < 1e-9:
        return abs(ub - lb)
    return (ub - lb) / abs(ub)


def master_solve(model, time_limit=None):
    if model.has_binaries:
        return lp.solve_mip(model, time_limit=time_limit)
    return lp.solve_lp(model)
