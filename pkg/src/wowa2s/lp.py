"""Dense LP / mixed-binary kernel.

Two-phase primal simplex on a bounded-variable standard form.  Free
variables are split and shifted at ingest time; phase 1 prices are the
Farkas certificate on infeasible systems, phase 2 emits dual values and
reduced costs at optimality and an improving ray on unbounded problems.
Binaries are handled by best-bound branch and bound with dual-simplex
warm starts from the parent basis.

Dual sign convention: for minimization, duals of ``<=`` rows are <= 0 and
duals of ``>=`` rows are >= 0; for maximization the signs flip.  A Farkas
ray y (always reported in phase-1 orientation, independent of sense)
satisfies y_i >= 0 on ``>=`` rows, y_i <= 0 on ``<=`` rows, and
``max over the variable box of (y'A)x < y'b``.
"""

import heapq
import math
import time

import numpy as np
from scipy.linalg import lu_factor, lu_solve

INF = math.inf

LE, EQ, GE = "<=", "=", ">="

FEAS_TOL = 1e-7       # absolute primal feasibility, per constraint
OPT_TOL = 1e-7        # reduced-cost optimality
INT_TOL = 1e-6        # binary integrality
PIVOT_TOL = 1e-9
DEGEN_STEP_TOL = 1e-10
DEGENERATE_PIVOT_LIMIT = 50   # switch Dantzig -> Bland after this many
REFACTOR_EVERY = 64

_AT_LO, _AT_UP, _BASIC = 0, 1, 2


class LpError(Exception):
    """Malformed model or unusable solver input."""


class NumericalFailure(LpError):
    """Simplex stalled after the anti-cycling fallback; carries basis state."""

    def __init__(self, message, basis=None):
        super().__init__(message)
        self.basis = basis


class ResourceLimit(LpError):
    """Node or time budget exhausted; carries the best incumbent found."""

    def __init__(self, message, incumbent=None, objective=None, bound=None):
        super().__init__(message)
        self.incumbent = incumbent
        self.objective = objective
        self.bound = bound


class LpModel:
    """LP/MIP in row form: min or max c'x subject to rows {<=,=,>=} rhs and
    variable bounds; variables are continuous or binary.

    Variables must all be added before the first row.
    """

    def __init__(self, sense="min"):
        if sense not in ("min", "max"):
            raise LpError(f"sense must be 'min' or 'max', got {sense!r}")
        self.sense = sense
        self.obj = []
        self.lb = []
        self.ub = []
        self.binary = []
        self.rows = []       # (coeff array, rel, rhs)

    @property
    def num_vars(self):
        return len(self.obj)

    @property
    def num_rows(self):
        return len(self.rows)

    @property
    def has_binaries(self):
        return any(self.binary)

    def add_var(self, obj=0.0, lb=0.0, ub=INF, binary=False):
        if self.rows:
            raise LpError("all variables must be added before the first row")
        if binary:
            if ub == INF:
                ub = 1.0
            if lb < 0.0 or ub > 1.0:
                raise LpError("binary variable bounds must lie within [0, 1]")
        if lb > ub:
            raise LpError(f"lower bound {lb} exceeds upper bound {ub}")
        self.obj.append(float(obj))
        self.lb.append(float(lb))
        self.ub.append(float(ub))
        self.binary.append(bool(binary))
        return len(self.obj) - 1

    def add_row(self, coeffs, rel, rhs):
        if rel not in (LE, EQ, GE):
            raise LpError(f"unknown relation {rel!r}")
        if isinstance(coeffs, dict):
            dense = np.zeros(self.num_vars)
            for j, v in coeffs.items():
                dense[j] = v
            coeffs = dense
        else:
            coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (self.num_vars,):
            raise LpError(
                f"row has {coeffs.shape[0] if coeffs.ndim == 1 else '?'} "
                f"coefficients, model has {self.num_vars} variables"
            )
        self.rows.append((coeffs, rel, float(rhs)))
        return len(self.rows) - 1

    def copy(self):
        other = LpModel(self.sense)
        other.obj = list(self.obj)
        other.lb = list(self.lb)
        other.ub = list(self.ub)
        other.binary = list(self.binary)
        other.rows = [(c.copy(), rel, rhs) for c, rel, rhs in self.rows]
        return other

    def row_matrix(self):
        if not self.rows:
            return np.zeros((0, self.num_vars))
        return np.vstack([c for c, _, _ in self.rows])

    def rhs_vector(self):
        return np.array([rhs for _, _, rhs in self.rows])


class LpOutcome:
    """Solve result.  status is 'optimal', 'infeasible' or 'unbounded'.

    optimal:    x, objective, duals (per row), reduced_costs (per var)
    infeasible: farkas (per-row certificate, see module docstring)
    unbounded:  ray (improving recession direction over the variables)
    basis is an opaque warm-start token for re-solves of the same shape.
    """

    def __init__(self, status, x=None, objective=None, duals=None,
                 reduced_costs=None, farkas=None, ray=None, basis=None,
                 nodes=0):
        self.status = status
        self.x = x
        self.objective = objective
        self.duals = duals
        self.reduced_costs = reduced_costs
        self.farkas = farkas
        self.ray = ray
        self.basis = basis
        self.nodes = nodes

    def __repr__(self):
        if self.status == "optimal":
            return f"LpOutcome(optimal, objective={self.objective})"
        return f"LpOutcome({self.status})"


class _Standard:
    """Bounded standard form: min cost'z, T z = rhs, lo <= z <= hi.

    Free user variables are split (z+ - z-), finite lower bounds shifted to
    zero, upper-bounded-only variables mirrored.  One slack column per
    inequality row, one artificial column per row (fixed at zero unless
    phase 1 needs it).
    """

    def __init__(self, model):
        self.model = model
        self.sgn = 1.0 if model.sense == "min" else -1.0
        n_user = model.num_vars
        m = model.num_rows

        cols_per_var = []        # (kind, col [, col_neg]) with kind shift/mirror/split
        offsets = np.zeros(n_user)
        col_of_user = []
        lo, hi, cost = [], [], []
        ncol = 0
        for j in range(n_user):
            l, u, c = model.lb[j], model.ub[j], model.obj[j]
            if l > -INF:
                offsets[j] = l
                cols_per_var.append(("shift", ncol))
                lo.append(0.0)
                hi.append(u - l)
                cost.append(self.sgn * c)
                ncol += 1
            elif u < INF:
                offsets[j] = u
                cols_per_var.append(("mirror", ncol))
                lo.append(0.0)
                hi.append(INF)
                cost.append(-self.sgn * c)
                ncol += 1
            else:
                cols_per_var.append(("split", ncol, ncol + 1))
                lo.extend((0.0, 0.0))
                hi.extend((INF, INF))
                cost.extend((self.sgn * c, -self.sgn * c))
                ncol += 2
        self.var_desc = cols_per_var
        self.offsets = offsets
        self.n_struct = ncol

        A = model.row_matrix()
        b = model.rhs_vector()
        self.rels = [rel for _, rel, _ in model.rows]
        rhs = b - A @ offsets
        T = np.zeros((m, ncol + sum(1 for r in self.rels if r != EQ) + 2 * m))
        for j, desc in enumerate(cols_per_var):
            if desc[0] == "shift":
                T[:, desc[1]] = A[:, j]
            elif desc[0] == "mirror":
                T[:, desc[1]] = -A[:, j]
            else:
                T[:, desc[1]] = A[:, j]
                T[:, desc[2]] = -A[:, j]

        # slack columns
        self.slack_of_row = np.full(m, -1, dtype=int)
        k = ncol
        for i, rel in enumerate(self.rels):
            if rel == LE:
                T[i, k] = 1.0
            elif rel == GE:
                T[i, k] = -1.0
            else:
                continue
            self.slack_of_row[i] = k
            lo.append(0.0)
            hi.append(INF)
            cost.append(0.0)
            k += 1
        self.n_slack = k - ncol

        # artificial column pair (+1/-1) per row, closed outside phase 1;
        # constant coefficients keep basis snapshots valid across engines
        self.art_plus = np.arange(k, k + m)
        self.art_minus = np.arange(k + m, k + 2 * m)
        self.art_cols = np.arange(k, k + 2 * m)
        for i in range(m):
            T[i, k + i] = 1.0
            T[i, k + m + i] = -1.0
        for _ in range(2 * m):
            lo.append(0.0)
            hi.append(0.0)
            cost.append(0.0)
        self.T = T
        self.rhs = rhs
        self.cost = np.array(cost)
        self.lo = np.array(lo)
        self.hi = np.array(hi)
        self.n = self.T.shape[1]
        self.m = m

        # internal column index of each binary user variable (shift, offset 0)
        self.binary_cols = [
            cols_per_var[j][1] for j in range(n_user) if model.binary[j]
        ]
        self.user_of_binary = [j for j in range(n_user) if model.binary[j]]

    def user_x(self, val):
        x = np.array(self.offsets)
        for j, desc in enumerate(self.var_desc):
            if desc[0] == "shift":
                x[j] += val[desc[1]]
            elif desc[0] == "mirror":
                x[j] -= val[desc[1]]
            else:
                x[j] = val[desc[1]] - val[desc[2]]
        return x

    def user_ray(self, ray):
        r = np.zeros(len(self.var_desc))
        for j, desc in enumerate(self.var_desc):
            if desc[0] == "shift":
                r[j] = ray[desc[1]]
            elif desc[0] == "mirror":
                r[j] = -ray[desc[1]]
            else:
                r[j] = ray[desc[1]] - ray[desc[2]]
        return r


class _Simplex:
    """Revised simplex over a _Standard form, with LU factorization of the
    basis refreshed every REFACTOR_EVERY pivots and product-form eta updates
    in between.  Not reusable across concurrent callers."""

    def __init__(self, std):
        self.s = std
        self.lo = std.lo.copy()
        self.hi = std.hi.copy()
        self.basis = None          # int array (m,)
        self.stat = None           # int8 array (n,)
        self.val = None            # float array (n,)
        self._lu = None
        self._etas = []
        self._in_basis = None      # bool array (n,)

    # -- factorization ----------------------------------------------------

    def _refactor(self):
        if self.s.m == 0:
            self._lu = None
            self._etas = []
            return
        B = self.s.T[:, self.basis]
        try:
            self._lu = lu_factor(B, check_finite=False)
        except Exception as exc:  # singular basis
            raise NumericalFailure(f"basis factorization failed: {exc}",
                                   basis=self.snapshot()) from exc
        self._etas = []

    def _ftran(self, v):
        if self.s.m == 0:
            return np.zeros(0)
        x = lu_solve(self._lu, v, check_finite=False)
        for r, d in self._etas:
            t = x[r] / d[r]
            if t != 0.0:
                x -= d * t
            x[r] = t
        return x

    def _btran(self, v):
        if self.s.m == 0:
            return np.zeros(0)
        u = np.array(v, dtype=float)
        for r, d in reversed(self._etas):
            u[r] = (u[r] - (d @ u) + d[r] * u[r]) / d[r]
        return lu_solve(self._lu, u, trans=1, check_finite=False)

    def _recompute_basics(self):
        vnb = self.val.copy()
        vnb[self.basis] = 0.0
        resid = self.s.rhs - self.s.T @ vnb
        self.val[self.basis] = self._ftran(resid)

    def snapshot(self):
        return (self.basis.copy(), self.stat.copy())

    def restore(self, snap):
        basis, stat = snap
        self.basis = basis.copy()
        self.stat = stat.copy()
        self._in_basis = np.zeros(self.s.n, dtype=bool)
        self._in_basis[self.basis] = True
        self.val = np.where(self.stat == _AT_UP, self.hi, self.lo)
        self.val[~np.isfinite(self.val)] = 0.0
        self._refactor()
        self._recompute_basics()

    # -- initial basis -----------------------------------------------------

    def crash(self):
        """All structurals at lower bound; slacks absorb what they can and
        artificials pick up the remaining residual."""
        s = self.s
        self.hi[s.art_cols] = 0.0   # close artificials from any earlier solve
        self.stat = np.full(s.n, _AT_LO, dtype=np.int8)
        self.val = self.lo.copy()
        self.val[~np.isfinite(self.val)] = 0.0
        basis = np.empty(s.m, dtype=int)
        vnb = self.val.copy()
        resid = s.rhs - s.T @ vnb
        any_artificial = False
        for i in range(s.m):
            sl = s.slack_of_row[i]
            r = resid[i]
            if sl >= 0:
                coef = s.T[i, sl]
                v = r / coef
                if v >= 0.0:
                    basis[i] = sl
                    self.val[sl] = v
                    continue
            a = s.art_plus[i] if r >= 0 else s.art_minus[i]
            self.val[a] = abs(r)
            basis[i] = a
            any_artificial = True
        if any_artificial:
            self.hi[s.art_cols] = INF
        self.basis = basis
        self.stat[basis] = _BASIC
        self._in_basis = np.zeros(s.n, dtype=bool)
        self._in_basis[basis] = True
        self._refactor()

    # -- pivoting ----------------------------------------------------------

    def _primal_loop(self, cost, max_iter):
        """Drive to optimality for the given cost vector.  Returns 'optimal'
        or ('unbounded', ray). Raises NumericalFailure when stalled."""
        s = self.s
        movable = self.hi > self.lo
        bland = False
        degen = 0
        for _ in range(max_iter):
            y = self._btran(cost[self.basis])
            d = cost - y @ s.T
            elig = movable & ~self._in_basis & (
                ((self.stat == _AT_LO) & (d < -OPT_TOL))
                | ((self.stat == _AT_UP) & (d > OPT_TOL))
            )
            cand = np.nonzero(elig)[0]
            if cand.size == 0:
                if self._etas:
                    # confirm optimality against a fresh factorization
                    self._refactor()
                    self._recompute_basics()
                    continue
                return "optimal", None
            if bland:
                q = int(cand[0])
            else:
                q = int(cand[np.argmax(np.abs(d[cand]))])
            omega = 1.0 if self.stat[q] == _AT_LO else -1.0
            dcol = self._ftran(s.T[:, q])

            # ratio test: basics move by -omega*t*dcol, entering by omega*t
            bb = self.basis
            step = omega * dcol
            t_best = self.hi[q] - self.lo[q]
            block = -1   # -1: entering bound flip
            down = step > PIVOT_TOL
            up = step < -PIVOT_TOL
            with np.errstate(invalid="ignore"):
                tdown = np.where(down, (self.val[bb] - self.lo[bb]) / np.where(down, step, 1.0), INF)
                tup = np.where(up, (self.hi[bb] - self.val[bb]) / np.where(up, -step, 1.0), INF)
            ratios = np.minimum(tdown, tup)
            np.maximum(ratios, 0.0, out=ratios)
            rmin = ratios.min() if ratios.size else INF
            if rmin < t_best:
                near = np.nonzero(ratios <= rmin + 1e-12)[0]
                if bland:
                    block = int(near[np.argmin(bb[near])])
                else:
                    block = int(near[np.argmax(np.abs(dcol[near]))])
                t_best = ratios[block]
            if t_best == INF:
                if self._etas:
                    # confirm unboundedness against a fresh factorization
                    self._refactor()
                    self._recompute_basics()
                    continue
                ray = np.zeros(s.n)
                ray[q] = omega
                ray[bb] = -step
                return "unbounded", ray

            # apply step
            if t_best != 0.0:
                self.val[bb] -= step * t_best
                self.val[q] = self.val[q] + omega * t_best
            if block < 0:
                self.stat[q] = _AT_UP if self.stat[q] == _AT_LO else _AT_LO
                self.val[q] = self.hi[q] if self.stat[q] == _AT_UP else self.lo[q]
            else:
                if abs(dcol[block]) < PIVOT_TOL:
                    self._refactor()
                    self._recompute_basics()
                    continue
                leave = bb[block]
                hit_lower = step[block] > 0
                self.stat[leave] = _AT_LO if hit_lower else _AT_UP
                self.val[leave] = self.lo[leave] if hit_lower else self.hi[leave]
                self._in_basis[leave] = False
                self.basis[block] = q
                self.stat[q] = _BASIC
                self._in_basis[q] = True
                self._etas.append((block, dcol))
                if len(self._etas) >= REFACTOR_EVERY:
                    self._refactor()
                    self._recompute_basics()
            if t_best <= DEGEN_STEP_TOL:
                degen += 1
                if degen >= DEGENERATE_PIVOT_LIMIT:
                    bland = True
            else:
                degen = 0
                bland = False
        raise NumericalFailure(
            f"primal simplex exceeded {max_iter} iterations", basis=self.snapshot())

    def _dual_loop(self, cost, max_iter):
        """Restore primal feasibility from a dual-feasible basis after bound
        changes.  Returns 'optimal' or 'infeasible' (node-level, no ray)."""
        s = self.s
        for _ in range(max_iter):
            bb = self.basis
            xb = self.val[bb]
            viol_lo = self.lo[bb] - xb
            viol_up = xb - self.hi[bb]
            viol = np.maximum(viol_lo, viol_up)
            r = int(np.argmax(viol))
            if viol[r] <= FEAS_TOL:
                return "optimal"
            below = viol_lo[r] >= viol_up[r]

            rho = np.zeros(s.m)
            rho[r] = 1.0
            rho = self._btran(rho)
            alpha = rho @ s.T
            y = self._btran(cost[self.basis])
            d = cost - y @ s.T

            sign = 1.0 if below else -1.0
            a = sign * alpha
            movable = self.hi > self.lo
            elig = movable & ~self._in_basis & (
                ((self.stat == _AT_LO) & (a < -PIVOT_TOL))
                | ((self.stat == _AT_UP) & (a > PIVOT_TOL))
            )
            cand = np.nonzero(elig)[0]
            if cand.size == 0:
                return "infeasible"
            theta = np.abs(d[cand] / a[cand])
            tmin = theta.min()
            near = np.nonzero(theta <= tmin + 1e-12)[0]
            pick = near[np.argmax(np.abs(a[cand[near]]))]
            q = int(cand[pick])

            dcol = self._ftran(s.T[:, q])
            if abs(dcol[r]) < PIVOT_TOL:
                self._refactor()
                self._recompute_basics()
                dcol = self._ftran(s.T[:, q])
                if abs(dcol[r]) < PIVOT_TOL:
                    raise NumericalFailure("dual simplex hit a vanishing pivot",
                                           basis=self.snapshot())
            leave = bb[r]
            self.stat[leave] = _AT_LO if below else _AT_UP
            self.val[leave] = self.lo[leave] if below else self.hi[leave]
            self._in_basis[leave] = False
            self.basis[r] = q
            self.stat[q] = _BASIC
            self._in_basis[q] = True
            self._etas.append((r, dcol))
            if len(self._etas) >= REFACTOR_EVERY:
                self._refactor()
            self._recompute_basics()
        raise NumericalFailure(
            f"dual simplex exceeded {max_iter} iterations", basis=self.snapshot())

    # -- phases ------------------------------------------------------------

    def _phase1_cost(self):
        c = np.zeros(self.s.n)
        c[self.s.art_cols] = 1.0
        return c

    def solve_from_scratch(self, max_iter=None):
        """Two-phase solve.  Returns ('optimal' | 'infeasible' | 'unbounded',
        payload): farkas prices on infeasible, internal ray on unbounded."""
        s = self.s
        if max_iter is None:
            max_iter = max(2000, 40 * (s.m + s.n))
        self.crash()
        needs_phase1 = bool(np.any(self.val[s.art_cols] > FEAS_TOL))
        if needs_phase1:
            c1 = self._phase1_cost()
            status, _ = self._primal_loop(c1, max_iter)
            if status != "optimal":
                raise NumericalFailure("phase 1 reported unbounded",
                                       basis=self.snapshot())
            infeas = float(np.sum(self.val[s.art_cols]))
            if infeas > FEAS_TOL * max(1.0, float(np.abs(s.rhs).max(initial=0.0))):
                y = self._btran(c1[self.basis])
                return "infeasible", y
        # pin artificials for phase 2
        self.hi[s.art_cols] = 0.0
        return self._phase2(max_iter)

    def _phase2(self, max_iter):
        status, ray = self._primal_loop(self.s.cost, max_iter)
        if status == "unbounded":
            return "unbounded", ray
        self._refactor()
        self._recompute_basics()
        return "optimal", None

    def resolve_from(self, snap, max_iter=None):
        """Primal re-solve after an objective-only change (bounds and rows
        unchanged): the old basis stays primal feasible."""
        s = self.s
        if max_iter is None:
            max_iter = max(2000, 40 * (s.m + s.n))
        self.restore(snap)
        xb = self.val[self.basis]
        if (np.any(xb < self.lo[self.basis] - 1e-6)
                or np.any(xb > self.hi[self.basis] + 1e-6)):
            return self.solve_from_scratch(max_iter)
        self.hi[s.art_cols] = 0.0
        return self._phase2(max_iter)

    def objective_internal(self):
        return float(self.s.cost @ self.val)

    def duals(self, cost=None):
        if cost is None:
            cost = self.s.cost
        return self._btran(cost[self.basis])


def _outcome_optimal(std, eng):
    x = std.user_x(eng.val)
    model = std.model
    obj = float(np.asarray(model.obj) @ x)
    y_int = eng.duals()
    y_user = std.sgn * y_int
    rc = np.asarray(model.obj) - y_user @ model.row_matrix() if model.num_rows else np.asarray(model.obj, dtype=float).copy()
    return LpOutcome("optimal", x=x, objective=obj, duals=y_user,
                     reduced_costs=rc, basis=eng.snapshot())


def solve_lp(model, basis=None):
    """Solve an all-continuous model.  Deterministic for a fixed model.

    basis: opaque token from a previous outcome on a model of identical
    shape (rows, bounds); used to warm start after objective changes.
    """
    if model.num_vars == 0:
        raise LpError("model has no variables")
    if model.has_binaries:
        raise LpError("solve_lp requires an all-continuous model")
    std = _Standard(model)
    eng = _Simplex(std)
    if basis is not None and len(basis[1]) == std.n:
        status, payload = eng.resolve_from(basis)
    else:
        status, payload = eng.solve_from_scratch()
    if status == "infeasible":
        return LpOutcome("infeasible", farkas=payload)
    if status == "unbounded":
        return LpOutcome("unbounded", ray=std.user_ray(payload))
    return _outcome_optimal(std, eng)


def _binary_fractionality(std, eng):
    """(max distance to nearest integer, column of the most fractional)."""
    worst, col = 0.0, -1
    for c in std.binary_cols:
        v = eng.val[c]
        f = abs(v - round(v))
        if f > worst + 1e-15:
            worst, col = f, c
    return worst, col


def solve_mip(model, node_limit=200_000, time_limit=None):
    """Branch and bound over the binary variables: best-bound node selection
    (deeper node on ties), branching on the most fractional binary.  Returns
    the incumbent with duals of the final LP re-solved with binaries fixed."""
    if model.num_vars == 0:
        raise LpError("model has no variables")
    if not model.has_binaries:
        return solve_lp(model)
    std = _Standard(model)
    eng = _Simplex(std)
    t0 = time.monotonic()
    status, payload = eng.solve_from_scratch()
    if status == "infeasible":
        return LpOutcome("infeasible", farkas=payload)
    if status == "unbounded":
        return LpOutcome("unbounded", ray=std.user_ray(payload))

    root_lo = eng.lo.copy()
    root_hi = eng.hi.copy()
    inc_val = None
    inc_obj = INF        # internal (minimization) objective
    seq = 0
    nodes = 0
    # heap entries: (bound, -depth, seq, fixes, snapshot)
    heap = [(eng.objective_internal(), 0, 0, (), eng.snapshot())]
    while heap:
        bound, negdepth, _, fixes, snap = heapq.heappop(heap)
        if bound >= inc_obj - max(1e-9, 1e-9 * abs(inc_obj)):
            break
        nodes += 1
        if nodes > node_limit or (
                time_limit is not None and time.monotonic() - t0 > time_limit):
            x = std.user_x(inc_val) if inc_val is not None else None
            obj = (float(np.asarray(model.obj) @ x) if x is not None else None)
            raise ResourceLimit(
                f"branch and bound stopped after {nodes - 1} nodes",
                incumbent=x, objective=obj,
                bound=std.sgn * bound + 0.0)
        eng.lo[:] = root_lo
        eng.hi[:] = root_hi
        for col, v in fixes:
            eng.lo[col] = v
            eng.hi[col] = v
        try:
            eng.restore(snap)
            eng.hi[std.art_cols] = 0.0
            st = eng._dual_loop(std.cost, max_iter=max(2000, 20 * std.m))
        except NumericalFailure:
            st, _ = eng.solve_from_scratch()
            st = "optimal" if st == "optimal" else "infeasible"
        if st != "optimal":
            continue
        node_obj = eng.objective_internal()
        if node_obj >= inc_obj - max(1e-9, 1e-9 * abs(inc_obj)):
            continue
        frac, col = _binary_fractionality(std, eng)
        if frac <= INT_TOL:
            inc_obj = node_obj
            inc_val = eng.val.copy()
            continue
        depth = -negdepth + 1
        child_snap = eng.snapshot()
        for v in (0.0, 1.0):
            seq += 1
            heapq.heappush(
                heap, (node_obj, -depth, seq, fixes + ((col, v),), child_snap))

    if inc_val is None:
        return LpOutcome("infeasible", nodes=nodes)

    # integral values can carry LP-tolerance dust; snap before the final solve
    fixed = model.copy()
    for col, j in zip(std.binary_cols, std.user_of_binary):
        v = round(float(inc_val[col]))
        fixed.lb[j] = v
        fixed.ub[j] = v
        fixed.binary[j] = False
    out = solve_lp(fixed)
    if out.status != "optimal":
        raise NumericalFailure(
            "incumbent re-solve with fixed binaries did not reach optimality")
    out.nodes = nodes
    return out


def farkas_gap(model, y):
    """y'b minus the max of (y'A)x over the variable box: positive means y
    certifies infeasibility (sign conventions checked separately)."""
    A = model.row_matrix()
    b = model.rhs_vector()
    v = y @ A
    lb = np.asarray(model.lb)
    ub = np.asarray(model.ub)
    cap = 0.0
    for j in range(model.num_vars):
        if v[j] > 0:
            if ub[j] == INF:
                return -INF
            cap += v[j] * ub[j]
        elif v[j] < 0:
            if lb[j] == -INF:
                return -INF
            cap += v[j] * lb[j]
    return float(y @ b - cap)
