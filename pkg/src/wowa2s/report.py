"""Solve reports and per-iteration traces shared by all solvers."""

import json
from dataclasses import dataclass, field, asdict

GAP_CLOSED = "GapClosed"
ITER_LIMIT = "IterLimit"
TIME_LIMIT = "TimeLimit"
INFEASIBLE = "Infeasible"


@dataclass
class IterationRecord:
    """One major iteration of a cut-generation solver.  ub is None on
    feasibility-cut iterations.  ray_certificates holds one
    (scenario, ray_objective, max_rayB) triple per feasibility cut added,
    where ray_objective = gamma'(h - A x*) and max_rayB = max of gamma'B."""

    index: int
    lb: float
    ub: float | None
    n_feasibility_cuts: int
    n_optimality_cuts: int
    master_time: float
    sub_time: float
    ray_certificates: list = field(default_factory=list)


@dataclass
class SolveReport:
    method: str
    objective: float | None
    first_stage: list
    recourse_values: list
    iterations: int
    feasibility_cuts: int
    optimality_cuts: int
    wall_time: float
    master_time: float
    sub_time: float
    termination: str
    gap: float | None = None
    trace: list = field(default_factory=list)

    def to_dict(self):
        d = asdict(self)
        d["trace"] = [asdict(t) if isinstance(t, IterationRecord) else t
                      for t in self.trace]
        return d

    @classmethod
    def from_dict(cls, data):
        trace = [IterationRecord(**t) for t in data.get("trace", [])]
        kwargs = dict(data)
        kwargs["trace"] = trace
        return cls(**kwargs)

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1)
            fh.write("\n")

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))
