"""Location-transportation benchmark under demand uncertainty.

m candidate facility sites (open/close binary z_i, production x_i up to
capacity M_i when open, fixed cost f_i, unit cost c_i) serve n customer
sites whose demands h_j are uncertain with K scenarios; shipping one unit
from i to j costs d_ij.  Second stage: ship y_ij >= 0 with per-facility
supply limits sum_j y_ij <= x_i and demand covers sum_i y_ij >= h^k_j.

Instances are generated from integer uniform ranges: mean demands in
[10, 500] and scenario demands in [mean, 2*mean]; fixed costs [100, 500],
unit costs [10, 50], transport costs [1, 1000]; probabilities from raw
integers in [1, 100]; capacities in [ceil(D/m), 2*ceil(D/m)] where D is
the largest scenario's total demand, so opening everything is always
feasible.  Randomness is a fully specified splitmix64, one sub-stream per
data family, for cross-language reproducibility.
"""

import json
from dataclasses import dataclass

import numpy as np

from .two_stage import ParseError, Scenario, TwoStageProblem, eval_recourse
from .aggregation import WeightVector

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_STREAM_STEP = 0xD1B54A32D192ED03   # distinct odd constant separating streams

_STREAM_DEMANDS = 0
_STREAM_COSTS = 1
_STREAM_PROBABILITIES = 2
_STREAM_CAPACITIES = 3


class SplitMix64:
    """The standard splitmix64 sequence from a 64-bit seed."""

    def __init__(self, seed):
        self.state = seed & _MASK

    def next_u64(self):
        self.state = (self.state + _GOLDEN) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def randint(self, lo, hi):
        """Uniform integer in [lo, hi] via rejection sampling."""
        span = hi - lo + 1
        limit = (1 << 64) - ((1 << 64) % span)
        while True:
            r = self.next_u64()
            if r < limit:
                return lo + r % span


def _stream(seed, index):
    return SplitMix64((seed + (index + 1) * _STREAM_STEP) & _MASK)


@dataclass
class LocTransInstance:
    m: int                 # facility sites
    n: int                 # customer sites
    K: int                 # demand scenarios
    M: np.ndarray          # capacities (m,)
    f: np.ndarray          # fixed opening costs (m,)
    c: np.ndarray          # unit production costs (m,)
    d: np.ndarray          # transport costs (m, n)
    h: np.ndarray          # scenario demands (K, n)
    p_raw: np.ndarray      # raw probability integers (K,)
    seed: int

    @property
    def p(self):
        return self.p_raw / self.p_raw.sum()

    def total_demand(self, k):
        return float(self.h[k].sum())


def generate(n, m, K, seed):
    """Deterministic random instance for (n, m, K, seed)."""
    if min(n, m, K) < 1:
        raise ValueError("n, m and K must all be at least 1")
    demands = _stream(seed, _STREAM_DEMANDS)
    costs = _stream(seed, _STREAM_COSTS)
    probs = _stream(seed, _STREAM_PROBABILITIES)
    caps = _stream(seed, _STREAM_CAPACITIES)

    h_mean = [demands.randint(10, 500) for _ in range(n)]
    h = np.array([[demands.randint(h_mean[j], 2 * h_mean[j]) for j in range(n)]
                  for _ in range(K)], dtype=float)
    f = np.array([costs.randint(100, 500) for _ in range(m)], dtype=float)
    c = np.array([costs.randint(10, 50) for _ in range(m)], dtype=float)
    d = np.array([[costs.randint(1, 1000) for _ in range(n)]
                  for _ in range(m)], dtype=float)
    p_raw = np.array([probs.randint(1, 100) for _ in range(K)], dtype=float)
    demand_peak = int(h.sum(axis=1).max())
    base = -(-demand_peak // m)   # ceil
    M = np.array([caps.randint(base, 2 * base) for _ in range(m)], dtype=float)
    return LocTransInstance(m=m, n=n, K=K, M=M, f=f, c=c, d=d, h=h,
                            p_raw=p_raw, seed=seed)


def to_two_stage(inst, w, importance=None):
    """Map to the two-stage form: first stage (z, x) with rows
    x_i - M_i z_i <= 0; per scenario, shipping variables plus slack/surplus
    columns turning the supply and demand inequalities into equalities.

    importance overrides the instance probabilities (the robust criterion
    replaces them with uniform weights)."""
    m, n = inst.m, inst.n
    if isinstance(w, WeightVector):
        if w.K != inst.K:
            raise ValueError(f"w has {w.K} entries, instance has {inst.K} scenarios")
    else:
        w = WeightVector(w, "preferential")
    n1 = 2 * m
    c1 = np.concatenate((inst.f, inst.c))
    rows = []
    for i in range(m):
        row = np.zeros(n1)
        row[i] = -inst.M[i]      # z_i column
        row[m + i] = 1.0         # x_i column
        rows.append((row, "<=", 0.0))
    mask = np.zeros(n1, dtype=bool)
    mask[:m] = True

    n_ship = m * n
    n2 = n_ship + m + n          # shipping + supply slacks + demand surplus
    rows2 = m + n
    A = np.zeros((rows2, n1))
    B = np.zeros((rows2, n2))
    d2 = np.concatenate((inst.d.reshape(-1), np.zeros(m + n)))
    for i in range(m):
        A[i, m + i] = -1.0                    # sum_j y_ij + s_i = x_i
        B[i, i * n:(i + 1) * n] = 1.0
        B[i, n_ship + i] = 1.0
    for j in range(n):
        B[m + j, j:n_ship:n] = 1.0            # sum_i y_ij - t_j = h_j
        B[m + j, n_ship + m + j] = -1.0

    scenarios = [
        Scenario(d=d2, A=A, B=B,
                 h=np.concatenate((np.zeros(m), inst.h[k])))
        for k in range(inst.K)
    ]
    p = importance if importance is not None else WeightVector(inst.p, "importance")
    return TwoStageProblem(c1, rows, mask, scenarios, p, w)


def evaluate_solution(inst, z, x):
    """Expected and worst-case total cost of a first-stage solution.

    Solves each scenario's shipping problem exactly at the given (z, x);
    raises when some scenario cannot be served.
    """
    z = np.asarray(z, dtype=float)
    x = np.asarray(x, dtype=float)
    problem = to_two_stage(inst, WeightVector.uniform(inst.K, "preferential"))
    first_stage = np.concatenate((z, x))
    base_cost = float(inst.f @ z + inst.c @ x)
    values = []
    for k in range(inst.K):
        res = eval_recourse(problem, k, first_stage)
        if res.status != "finite":
            raise ValueError(f"scenario {k} is infeasible at this first stage")
        values.append(res.value)
    values = np.array(values)
    return {
        "expected_cost": base_cost + float(inst.p @ values),
        "worst_case_cost": base_cost + float(values.max()),
    }


# -- instance files -----------------------------------------------------------

def save_loctrans(inst, path):
    data = {
        "loctrans": {"m": inst.m, "n": inst.n, "K": inst.K, "seed": inst.seed},
        "M": inst.M.tolist(),
        "f": inst.f.tolist(),
        "c": inst.c.tolist(),
        "d": inst.d.tolist(),
        "h": inst.h.tolist(),
        "p_raw": inst.p_raw.tolist(),
    }
    with open(path, "w") as fh:
        json.dump(data, fh, indent=1)
        fh.write("\n")


def load_loctrans(path):
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: not valid JSON ({exc})") from exc
    where = str(path)
    if "loctrans" not in data:
        raise ParseError(f"{where}: missing 'loctrans' header block")
    head = data["loctrans"]
    for fieldname in ("m", "n", "K", "seed"):
        if fieldname not in head:
            raise ParseError(f"{where}: loctrans header missing {fieldname!r}")
    m, n, K = head["m"], head["n"], head["K"]
    arrays = {}
    shapes = {"M": (m,), "f": (m,), "c": (m,), "d": (m, n), "h": (K, n),
              "p_raw": (K,)}
    for name, shape in shapes.items():
        if name not in data:
            raise ParseError(f"{where}: missing array {name!r}")
        arr = np.asarray(data[name], dtype=float)
        if arr.shape != shape:
            raise ParseError(f"{where}: {name} has shape {arr.shape}, expected {shape}")
        arrays[name] = arr
    if np.any(arrays["p_raw"] <= 0):
        raise ParseError(f"{where}: probability integers must be positive")
    return LocTransInstance(m=m, n=n, K=K, seed=head["seed"], **arrays)
