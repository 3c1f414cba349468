"""Shared convex-feasibility machinery.

Both the joint-measurability and the hidden-state-model questions reduce to
the same template: find ``2**n`` PSD matrices ``G_a`` indexed by sign tuples
``a`` whose total equals a given operator and whose per-setting marginals
``sum over {a : a_x = +1}`` equal given operators.  The engine is Dykstra's
alternating projection between the product PSD cone and that affine set, with
correction terms on the cone side only (none are needed for an affine set).

Infeasibility is reported heuristically: projection methods cannot certify
it, so the verdict fires when the residual stops improving (less than
``stagnation_eps`` over ``stagnation_window`` iterations) while still above
``10 * tol``.  An honest UNDECIDED is returned when neither side resolves
within the iteration budget.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import backend
from .config import DEFAULTS, Tolerances
from .errors import DomainError


class FeasStatus(enum.Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    UNDECIDED = "undecided"


_STATUS_FROM_CODE = {
    backend.STATUS_FEASIBLE: FeasStatus.FEASIBLE,
    backend.STATUS_INFEASIBLE: FeasStatus.INFEASIBLE,
    backend.STATUS_UNDECIDED: FeasStatus.UNDECIDED,
}


@dataclass(frozen=True)
class FeasibilityResult:
    status: FeasStatus
    residual: float
    iterations: int
    matrices: np.ndarray  # (2**n, d, d) final PSD iterate


def membership_masks(n: int) -> np.ndarray:
    """Constraint membership over the 2**n sign tuples.

    Row 0 is the all-ones total mask; row ``1 + x`` selects the tuples whose
    bit ``x`` is set (outcome +1 for setting ``x``).
    """
    nvar = 2 ** n
    memb = np.zeros((n + 1, nvar), dtype=np.uint8)
    memb[0, :] = 1
    idx = np.arange(nvar)
    for x in range(n):
        memb[x + 1, (idx >> x) & 1 == 1] = 1
    return memb


def linear_ansatz(plus_effects: Sequence[np.ndarray], total: np.ndarray) -> np.ndarray:
    """Symmetric affine-consistent starting point.

    ``G_a = total/2**n + sum_x (E_{a_x|x} - total/2) / 2**(n-1)`` satisfies
    every marginal constraint exactly, is invariant under permuting the
    settings, and already lies in the PSD cone whenever the inputs are weakly
    incompatible.
    """
    n = len(plus_effects)
    d = total.shape[0]
    nvar = 2 ** n
    init = np.empty((nvar, d, d), dtype=complex)
    half = total / 2.0
    for a in range(nvar):
        g = total / nvar
        for x in range(n):
            e = plus_effects[x] if (a >> x) & 1 else total - plus_effects[x]
            g = g + (e - half) / 2 ** (n - 1)
        init[a] = g
    return init


def masked_marginal_feasibility(
    plus_effects: Sequence[np.ndarray],
    total: np.ndarray,
    tol: float | None = None,
    max_iter: int | None = None,
    cfg: Tolerances = DEFAULTS,
) -> FeasibilityResult:
    """Run the Dykstra engine on the masked-marginal template above."""
    n = len(plus_effects)
    if n < 1:
        raise DomainError("need at least one setting")
    if n > 9:
        raise DomainError(f"2**{n} effect variables exceed the desk-scale cap (n <= 9)")
    d = total.shape[0]
    for e in plus_effects:
        if e.shape != (d, d):
            raise DomainError(f"effect shape {e.shape} does not match total {total.shape}")
    tol = cfg.feas_tol if tol is None else tol
    max_iter = cfg.feas_max_iter if max_iter is None else max_iter

    memb = membership_masks(n)
    minv = np.linalg.inv((memb @ memb.T).astype(float))
    targets = np.stack([total] + [np.asarray(e, dtype=complex) for e in plus_effects])
    init = linear_ansatz(plus_effects, total)
    code, residual, iterations, mats = backend.dykstra_masked(
        init, memb, minv, targets, tol, max_iter,
        cfg.stagnation_window, cfg.stagnation_eps,
        cfg.jacobi_offdiag, cfg.jacobi_max_sweeps,
    )
    return FeasibilityResult(_STATUS_FROM_CODE[code], float(residual),
                             int(iterations), np.asarray(mats))


@dataclass(frozen=True)
class ThresholdResult:
    """Critical-unsharpness bracket from bisection.

    ``eta_star`` is the midpoint of the final ``(lower, upper)`` bracket with
    ``lower`` feasible and ``upper`` infeasible (both equal 1.0 when the set
    is feasible even sharp).  ``undecided_band`` is None unless some bracket
    midpoint stayed undecided after the one permitted tolerance widening, in
    which case it reports the unresolved interval.
    """

    eta_star: float
    lower: float
    upper: float
    evaluations: int
    undecided_band: tuple[float, float] | None = None

    @property
    def width(self) -> float:
        return self.upper - self.lower


def bisect_threshold(evaluate: Callable[[float], FeasStatus],
                     eta_tol: float | None = None,
                     cfg: Tolerances = DEFAULTS) -> ThresholdResult:
    """Bisect the critical unsharpness of a monotone feasibility predicate.

    ``evaluate`` maps an unsharpness in [0, 1] to a ``FeasStatus``; eta = 0
    is assumed feasible (trivial measurements are always compatible).  The
    driver handling UNDECIDED retries is the caller's responsibility; an
    UNDECIDED returned here terminates the bisection with the band recorded.
    """
    eta_tol = cfg.eta_tol if eta_tol is None else eta_tol
    if eta_tol < 1e-4:
        raise DomainError(f"eta_tol below 1e-4 is not supported, got {eta_tol}")
    evaluations = 1
    if evaluate(1.0) is FeasStatus.FEASIBLE:
        return ThresholdResult(1.0, 1.0, 1.0, evaluations)
    lo, hi = 0.0, 1.0
    while hi - lo > eta_tol:
        mid = 0.5 * (lo + hi)
        verdict = evaluate(mid)
        evaluations += 1
        if verdict is FeasStatus.FEASIBLE:
            lo = mid
        elif verdict is FeasStatus.INFEASIBLE:
            hi = mid
        else:
            return ThresholdResult(0.5 * (lo + hi), lo, hi, evaluations,
                                   undecided_band=(lo, hi))
    return ThresholdResult(0.5 * (lo + hi), lo, hi, evaluations)
