"""Ordered weighted averaging (OWA) and weighted OWA (WOWA) aggregation.

The WOWA operator combines a rank-dependent *preferential* weight vector w
with a rank-independent *importance* weight vector p (typically scenario
probabilities).  The effective weight of the k-th largest value is the
increment of a piecewise-linear interpolant of the cumulative preferential
weights, evaluated at the cumulative importance of the values ranked so far.
Nonincreasing w makes the aggregation risk averse: larger values (costs)
receive at least as much weight as smaller ones.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

# Constructor-level rejection threshold; generated vectors are much tighter.
SUM_TOLERANCE = 1e-9

# Largest K accepted by the factorial brute-force evaluator.
BRUTE_FORCE_CAP = 7


class WeightError(ValueError):
    """Invalid weight vector or aggregation input."""


class WeightVector:
    """Normalized weight vector, preferential (rank-dependent) or importance.

    Entries must lie in [0, 1] and sum to 1; vectors whose sum deviates by
    more than ``SUM_TOLERANCE`` are rejected rather than silently
    renormalized, since that usually indicates a modeling error upstream.
    """

    __slots__ = ("entries", "kind")

    def __init__(self, entries, kind):
        entries = np.atleast_1d(np.asarray(entries, dtype=float))
        if entries.ndim != 1 or entries.size == 0:
            raise WeightError("weight vector must be a non-empty 1-d sequence")
        if kind not in ("preferential", "importance"):
            raise WeightError(f"unknown weight kind {kind!r}")
        if np.any(entries < 0.0) or np.any(entries > 1.0):
            raise WeightError("weight entries must lie in [0, 1]")
        total = float(entries.sum())
        if abs(total - 1.0) > SUM_TOLERANCE:
            raise WeightError(
                f"weight entries sum to {total!r}; vectors off by more than "
                f"{SUM_TOLERANCE} are rejected, not renormalized"
            )
        self.entries = entries
        self.kind = kind

    @property
    def K(self):
        return self.entries.size

    @property
    def is_nonincreasing(self):
        """True when entries[0] >= entries[1] >= ... (up to 1e-12 noise)."""
        return bool(np.all(np.diff(self.entries) <= 1e-12))

    @classmethod
    def uniform(cls, K, kind):
        return cls(np.full(K, 1.0 / K), kind)

    def __repr__(self):
        return f"WeightVector({self.entries.tolist()}, {self.kind!r})"


class Interpolant:
    """Piecewise-linear nondecreasing map through (0,0) and (i/K, sum w[:i]).

    The slope on segment ((i-1)/K, i/K] is K*w[i-1]; the map is concave
    exactly when w is nonincreasing.  Evaluation locates the segment by
    index arithmetic on ceil(t*K), so it is O(1) and exact at breakpoints.
    """

    __slots__ = ("cumulative", "segment_slopes", "K")

    def __init__(self, weights):
        weights = np.asarray(weights, dtype=float)
        self.K = weights.size
        self.cumulative = np.concatenate(([0.0], np.cumsum(weights)))
        self.segment_slopes = weights * self.K

    @classmethod
    def from_weights(cls, w):
        if isinstance(w, WeightVector):
            return cls(w.entries)
        return cls(w)

    @property
    def breakpoints(self):
        """(K+1, 2) array of (i/K, cumulative weight) pairs."""
        xs = np.arange(self.K + 1) / self.K
        return np.column_stack((xs, self.cumulative))

    @property
    def is_concave(self):
        return bool(np.all(np.diff(self.segment_slopes) <= 1e-12))

    def value(self, t):
        if not 0.0 <= t <= 1.0:
            raise WeightError(f"interpolant argument {t!r} outside [0, 1]")
        s = t * self.K
        idx = math.floor(s)
        if s == idx:  # exact breakpoint, covers t=0 and t=1
            return float(self.cumulative[int(idx)])
        return float(self.cumulative[idx] + (self.segment_slopes[idx] / self.K) * (s - idx))


@dataclass
class RankedWeights:
    """Effective weights after ranking: ``order`` sorts values nonincreasing
    (ties broken by ascending original index), ``weights[j]`` is the effective
    weight of the value at ``order[j]``; weights are >= 0 and sum to 1."""

    order: np.ndarray
    weights: np.ndarray


def exponential_owa_weights(alpha, K):
    """Nonincreasing preferential weights from an exponential distortion.

    Weight j is the increment of z -> (1 - alpha**z) / (1 - alpha) between
    (j-1)/K and j/K.  Smaller alpha concentrates weight on the largest
    (worst) values; alpha -> 1 approaches uniform weights but is undefined
    at 1, so risk-neutral callers should construct uniform weights directly.
    """
    if not 0.0 < alpha < 1.0:
        raise WeightError(f"alpha must lie strictly in (0, 1), got {alpha!r}")
    if K < 1:
        raise WeightError("K must be a positive integer")
    grid = np.arange(K + 1) / K
    cumulative = (1.0 - alpha ** grid) / (1.0 - alpha)
    return WeightVector(np.diff(cumulative), "preferential")


def _ranking(a):
    """Indices sorting a nonincreasing, ties broken by ascending index."""
    return np.argsort(-a, kind="stable")


def _check_dims(w, p, a):
    if p is not None and w.K != p.K:
        raise WeightError(f"weight lengths differ: {w.K} vs {p.K}")
    if a.shape != (w.K,):
        raise WeightError(f"expected {w.K} values, got shape {a.shape}")


def owa(w, a):
    """Ordered weighted average: w[0] weights the largest entry of a."""
    a = np.asarray(a, dtype=float)
    _check_dims(w, None, a)
    return float(w.entries @ a[_ranking(a)])


def ranked_weights(w, p, a):
    """Effective per-value weights of the WOWA aggregation of a.

    The j-th effective weight is the increment of the interpolant of w
    between the cumulative importance of the j-1 and j largest values.
    """
    a = np.asarray(a, dtype=float)
    _check_dims(w, p, a)
    order = _ranking(a)
    cum = np.minimum(np.cumsum(p.entries[order]), 1.0)
    interp = Interpolant.from_weights(w)
    vals = np.array([interp.value(t) for t in cum])
    deltas = np.diff(np.concatenate(([0.0], vals)))
    # the interpolant is nondecreasing, so negative increments are fp noise
    return RankedWeights(order, np.maximum(deltas, 0.0))


def wowa(w, p, a):
    """Weighted OWA of a under preferential weights w and importance p."""
    a = np.asarray(a, dtype=float)
    rw = ranked_weights(w, p, a)
    return float(rw.weights @ a[rw.order])


def wowa_bruteforce(w, p, a, cap=BRUTE_FORCE_CAP):
    """Max over all K! orderings of the rank-weighted sum; equals wowa(w,p,a)
    when w is nonincreasing (concave interpolant).  Test oracle only."""
    a = np.asarray(a, dtype=float)
    _check_dims(w, p, a)
    K = w.K
    if K > cap:
        raise WeightError(f"brute force refused for K={K} > cap={cap} (K! blowup)")
    if not w.is_nonincreasing:
        raise WeightError("brute-force characterization requires nonincreasing w")
    interp = Interpolant.from_weights(w)
    pe = p.entries
    best = -math.inf
    for perm in itertools.permutations(range(K)):
        cum = 0.0
        prev = 0.0
        total = 0.0
        for k in perm:
            cum = min(cum + pe[k], 1.0)
            v = interp.value(cum)
            total += (v - prev) * a[k]
            prev = v
        if total > best:
            best = total
    return best
