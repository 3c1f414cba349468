"""Dense two-phase simplex solver with Bland's anti-cycling rule.

Problems arrive in standard form: minimize ``c . z`` subject to ``A z = b``
with ``z >= 0``.  Phase one minimizes the sum of artificial variables from
the all-artificial basis; phase two re-prices the true objective.  Bland's
rule (lowest eligible index enters, lowest-index basic variable breaks ratio
ties) guarantees finite termination on these small dense problems.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULTS, Tolerances
from .errors import DomainError, NumericError


class LpStatus(enum.Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LpProblem:
    """Standard-form linear program: min c.z, A z = b, z >= 0."""

    objective: np.ndarray
    a_eq: np.ndarray
    b_eq: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.objective, dtype=float)
        a = np.asarray(self.a_eq, dtype=float)
        b = np.asarray(self.b_eq, dtype=float)
        if a.ndim != 2 or c.ndim != 1 or b.ndim != 1:
            raise DomainError("LP pieces have wrong ranks")
        if a.shape != (b.size, c.size):
            raise DomainError(
                f"LP shape mismatch: A {a.shape}, b {b.shape}, c {c.shape}")
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "a_eq", a)
        object.__setattr__(self, "b_eq", b)


@dataclass(frozen=True)
class LpSolution:
    status: LpStatus
    x: np.ndarray | None
    objective_value: float
    pivots: int
    max_violation: float
    message: str = ""


def _pivot(tableau: np.ndarray, row: int, col: int) -> None:
    tableau[row] /= tableau[row, col]
    for r in range(tableau.shape[0]):
        if r != row and tableau[r, col] != 0.0:
            tableau[r] -= tableau[r, col] * tableau[row]


def _bland_entering(obj_row: np.ndarray, allowed: int, tol: float) -> int:
    for j in range(allowed):
        if obj_row[j] < -tol:
            return j
    return -1


def _bland_leaving(tableau: np.ndarray, basis: list[int], col: int, m: int,
                   tol: float) -> int:
    best_ratio = np.inf
    best_row = -1
    for i in range(m):
        a = tableau[i, col]
        if a > tol:
            ratio = tableau[i, -1] / a
            if ratio < best_ratio - 1e-15 or (
                    abs(ratio - best_ratio) <= 1e-15
                    and best_row >= 0 and basis[i] < basis[best_row]):
                best_ratio = ratio
                best_row = i
    return best_row


def _run_simplex(tableau: np.ndarray, basis: list[int], allowed: int,
                 tol: float, budget: int) -> tuple[str, int]:
    m = tableau.shape[0] - 1
    pivots = 0
    while pivots < budget:
        col = _bland_entering(tableau[-1], allowed, tol)
        if col < 0:
            return "optimal", pivots
        row = _bland_leaving(tableau, basis, col, m, tol)
        if row < 0:
            return "unbounded", pivots
        _pivot(tableau, row, col)
        basis[row] = col
        pivots += 1
    raise NumericError(f"simplex exceeded the pivot budget ({budget})")


def solve_standard(problem: LpProblem, cfg: Tolerances = DEFAULTS) -> LpSolution:
    """Solve a standard-form LP; FEASIBLE solutions carry the optimal point.

    The returned ``max_violation`` is recomputed from the raw constraints
    (equality residual and negative-part of ``x``), independent of the
    solver's internal state.
    """
    tol = cfg.lp_tol
    c = problem.objective
    a = problem.a_eq.copy()
    b = problem.b_eq.copy()
    m, n = a.shape

    neg = b < 0
    a[neg] *= -1.0
    b[neg] *= -1.0

    # phase one: [A | I | b] with artificial basis and cost sum(artificials)
    tableau = np.zeros((m + 1, n + m + 1))
    tableau[:m, :n] = a
    tableau[:m, n:n + m] = np.eye(m)
    tableau[:m, -1] = b
    basis = list(range(n, n + m))
    tableau[-1, :n] = -a.sum(axis=0)
    tableau[-1, -1] = -b.sum()

    outcome, pivots = _run_simplex(tableau, basis, n + m, tol, cfg.lp_max_pivots)
    if outcome == "unbounded":  # cannot happen for the phase-one objective
        raise NumericError("phase one reported unbounded")
    phase1 = -tableau[-1, -1]
    if phase1 > 10 * tol:
        return LpSolution(LpStatus.INFEASIBLE, None, 0.0, pivots,
                          max_violation=float(phase1),
                          message=f"artificial residue {phase1:.3e}")

    # drive leftover artificials out of the basis where possible
    for i in range(m):
        if basis[i] >= n:
            for j in range(n):
                if abs(tableau[i, j]) > tol:
                    _pivot(tableau, i, j)
                    basis[i] = j
                    pivots += 1
                    break
            # an all-zero row is a redundant constraint; it stays inert

    # phase two: re-price the true objective over the original columns
    tableau[-1, :] = 0.0
    tableau[-1, :n] = c
    for i in range(m):
        if basis[i] < n and c[basis[i]] != 0.0:
            tableau[-1] -= c[basis[i]] * tableau[i]
    outcome, extra = _run_simplex(tableau, basis, n, tol, cfg.lp_max_pivots)
    pivots += extra
    if outcome == "unbounded":
        return LpSolution(LpStatus.UNBOUNDED, None, -np.inf, pivots, 0.0,
                          message="objective unbounded below")

    x = np.zeros(n)
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = tableau[i, -1]
    violation = float(max(np.abs(problem.a_eq @ x - problem.b_eq).max(initial=0.0),
                          -min(x.min(initial=0.0), 0.0)))
    return LpSolution(LpStatus.FEASIBLE, x, float(c @ x), pivots, violation)
