"""Errors shared by the solve front ends."""


class SolverError(RuntimeError):
    pass


class InfeasibleProblem(SolverError):
    """No first-stage point satisfies the accumulated constraints."""


class UnboundedProblem(SolverError):
    """Objective unbounded below."""


class StalledGap(SolverError):
    """An iteration added no cut while the gap is still open: numerical
    failure.  Carries diagnostics for the report."""

    def __init__(self, message, lb=None, ub=None, iteration=None, x=None):
        super().__init__(message)
        self.lb = lb
        self.ub = ub
        self.iteration = iteration
        self.x = x


class InvalidThetaFloor(SolverError):
    """Evidence that the supplied floor was not a valid lower bound on the
    WOWA of the recourse values."""
